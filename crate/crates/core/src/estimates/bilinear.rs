use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::norms::NormReport;
use crate::error::{invalid, Result};
use crate::seed::SeedStream;

/// Gaussian wave packet on the line,
/// `amplitude * exp(-(x - center)^2 / (4 width^2)) * exp(2 pi i frequency x)` at `t = 0`.
///
/// Its free evolution is available in closed form, so products of two
/// packets can be integrated over space exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Packet {
    pub amplitude: f64,
    pub width: f64,
    pub frequency: f64,
    pub center: f64,
}

impl Packet {
    /// Unit-mass packet.
    pub fn unit(width: f64, frequency: f64, center: f64) -> Self {
        Self { amplitude: (2.0 * PI).powf(-0.25) / width.sqrt(), width, frequency, center }
    }

    pub fn mass(&self) -> f64 {
        self.amplitude * self.amplitude * (2.0 * PI).sqrt() * self.width
    }

    /// `|u(t, x)|^3 = c exp(-alpha (x - x_c)^2)`; returns `(c, alpha, x_c)`.
    fn cubed_modulus(&self, t: f64) -> (f64, f64, f64) {
        let a = self.width * self.width;
        let rho2 = a * a + t * t;
        let c = self.amplitude.abs().powi(3) * (a * a / rho2).powf(0.75);
        (c, 0.75 * a / rho2, self.center + 4.0 * PI * self.frequency * t)
    }
}

fn product_integral(u: &Packet, v: &Packet, t: f64) -> f64 {
    let (cu, au, xu) = u.cubed_modulus(t);
    let (cv, av, xv) = v.cubed_modulus(t);
    let s = au + av;
    cu * cv * (PI / s).sqrt() * (-(au * av / s) * (xu - xv).powi(2)).exp()
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1])).sum()
}

/// `|| u v ||_{L^3(|t| <= t_final, x in R)}` for freely evolving packets, with a
/// sample-halving error estimate. The space integral is exact; time uses a
/// two-sided geometric grid refined near `t = 0`.
pub fn packet_pair_l3(u: &Packet, v: &Packet, t_final: f64) -> (f64, f64) {
    if u.amplitude == 0.0 || v.amplitude == 0.0 {
        return (0.0, 0.0);
    }
    let tau = 1e-3 * u.width.min(v.width).powi(2);
    let per_decade = 400.0;
    let decades = (t_final / tau).log10().max(1.0);
    let count = (decades * per_decade).ceil() as usize;
    let ratio = (t_final / tau).powf(1.0 / count as f64);
    let mut pos: Vec<f64> = (0..=count).map(|i| tau * ratio.powi(i as i32)).collect();
    *pos.last_mut().expect("non-empty") = t_final;
    let mut times: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
    times.push(0.0);
    times.extend(&pos);
    let f: Vec<f64> = times.iter().map(|t| product_integral(u, v, *t)).collect();
    let fine = trapezoid(&times, &f);
    let ct: Vec<f64> = times.iter().step_by(2).copied().collect();
    let cf: Vec<f64> = f.iter().step_by(2).copied().collect();
    let coarse = trapezoid(&ct, &cf);
    let value = fine.cbrt();
    (value, (value - coarse.max(0.0).cbrt()).abs())
}

fn random_packet<R: Rng>(rng: &mut R, scale: f64, center: f64) -> Packet {
    let width = rng.random_range(2.0..4.0) / (PI * scale);
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    Packet::unit(width, sign * 1.5 * scale, center)
}

/// Max over random unit-mass packet pairs (frequency `~M` and `~N`) of
/// `||u_M v_N||_{L^3_{t,x}} / ((M/N)^{1/4} ||u_0|| ||v_0||)`.
pub fn bilinear_check(m: f64, n: f64, trials: usize, seed: u64, t_final: f64) -> Result<NormReport> {
    if !(m > 0.0 && n >= 10.0 * m) {
        return Err(invalid("N", format!("requires N >= 10 M, got M = {m}, N = {n}")));
    }
    if trials == 0 || !(t_final > 0.0) {
        return Err(invalid("trials, T", "need at least one trial and T > 0"));
    }
    let stream = SeedStream::new(seed);
    let rows: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.rng(i as u64);
            let u = random_packet(&mut rng, m, 0.0);
            let offset = rng.random_range(-1.0..1.0) * u.width;
            let v = random_packet(&mut rng, n, offset);
            let (val, err) = packet_pair_l3(&u, &v, t_final);
            let denom = (m / n).powf(0.25) * u.mass().sqrt() * v.mass().sqrt();
            (val / denom, err / denom)
        })
        .collect();
    let max = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let mean = rows.iter().map(|r| r.0).sum::<f64>() / trials as f64;
    let err = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut rep = NormReport::new("bilinear_l3_ratio", max)
        .with_param("M", m)
        .with_param("N", n)
        .with_param("trials", trials as f64)
        .with_param("T", t_final)
        .with_param("mean_ratio", mean);
    rep.resolution = (0, trials);
    rep.quadrature_error_estimate = err;
    Ok(rep)
}

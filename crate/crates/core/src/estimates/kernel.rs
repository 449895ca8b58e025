use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::norms::NormReport;
use crate::error::{invalid, Result};
use crate::spectral_core::bump;

fn support_radius(l: f64, n: f64) -> i64 {
    (2.0 * l * n).floor() as i64
}

/// `K(t, x) = (1/L) sum_n exp(i(2 pi x n / L - 4 pi^2 t n^2 / L^2)) bump(n / (L N))`.
///
/// The `+-n` terms are paired so that `K(t, -x) = K(t, x)` holds bit for bit.
pub fn dispersive_kernel(l: f64, n: f64, t: f64, x: f64) -> Complex64 {
    let r = support_radius(l, n);
    let ln = l * n;
    let mut acc = Complex64::new(bump(0.0), 0.0);
    for k in 1..=r {
        let kf = k as f64;
        let w = bump(kf / ln);
        if w == 0.0 {
            continue;
        }
        let chirp = Complex64::from_polar(1.0, -4.0 * PI * PI * t * kf * kf / (l * l));
        acc += chirp * (2.0 * w * (2.0 * PI * x * kf / l).cos());
    }
    acc / l
}

/// `K(t, x_j)` at `x_j = j L / m`, `j = 0..m`, by one inverse FFT;
/// `m` is at least `4 L N + 1` and a power of two.
pub fn kernel_on_period(l: f64, n: f64, t: f64, min_points: usize) -> Vec<Complex64> {
    let r = support_radius(l, n);
    let m = min_points.max((4 * r + 1) as usize).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for k in -r..=r {
        let kf = k as f64;
        let c = Complex64::from_polar(bump(kf / (l * n)) / l, -4.0 * PI * PI * t * kf * kf / (l * l));
        buf[k.rem_euclid(m as i64) as usize] = c;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf
}

/// `sup |t|^{1/2} |K(t, x)|` over `t` in `[t_min, T]` (geometric samples) and all
/// `x` on the FFT lattice. The error estimate is the drop when every other
/// `x` sample is discarded.
pub fn kernel_dispersive_constant(
    l: f64,
    n: f64,
    t_final: f64,
    t_min: f64,
    x_samples: usize,
    t_samples: usize,
) -> Result<NormReport> {
    if !(t_min > 0.0 && t_min < t_final) {
        return Err(invalid("t_min", format!("need 0 < t_min < T, got {t_min} and {t_final}")));
    }
    if !(l > 0.0 && n > 0.0) || t_samples < 2 {
        return Err(invalid("L, N, t_samples", "L, N positive and at least two time samples"));
    }
    let ratio = (t_final / t_min).powf(1.0 / (t_samples - 1) as f64);
    let times: Vec<f64> = (0..t_samples).map(|i| t_min * ratio.powi(i as i32)).collect();
    let rows: Vec<(f64, f64, usize, usize)> = times
        .par_iter()
        .map(|&t| {
            let k = kernel_on_period(l, n, t, x_samples);
            let (mut best, mut arg, mut coarse) = (0.0, 0, 0.0f64);
            for (j, z) in k.iter().enumerate() {
                let v = z.norm();
                if v > best {
                    best = v;
                    arg = j;
                }
                if j % 2 == 0 {
                    coarse = coarse.max(v);
                }
            }
            (t.sqrt() * best, t.sqrt() * coarse, arg, k.len())
        })
        .collect();
    let (imax, top) = rows
        .iter()
        .enumerate()
        .fold((0, &rows[0]), |acc, (i, r)| if r.0 > acc.1 .0 { (i, r) } else { acc });
    let coarse = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let m = top.3;
    let xarg = top.2 as f64 * l / m as f64;
    let xarg = if xarg >= 0.5 * l { xarg - l } else { xarg };
    let mut rep = NormReport::new("kernel_dispersive_constant", top.0)
        .with_param("L", l)
        .with_param("N", n)
        .with_param("T", t_final)
        .with_param("t_min", t_min)
        .with_param("argmax_t", times[imax])
        .with_param("argmax_x", xarg);
    rep.resolution = (m, t_samples);
    rep.quadrature_error_estimate = top.0 - coarse;
    Ok(rep)
}

/// Literal sum and the right-hand side `1/(L s1) + M s2 / (L s1^2)` with constant 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatoryReport {
    pub value: f64,
    pub bound: f64,
    pub s1: f64,
    pub s2: f64,
    /// `s1 = 0` somewhere on the range: the bound is infinite.
    pub vacuous: bool,
}

impl OscillatoryReport {
    pub fn ratio(&self) -> f64 {
        if self.vacuous {
            0.0
        } else {
            self.value / self.bound
        }
    }
}

/// `|(1/L) sum_{|n| <= 2M} e^{i Phi(n)} f(n / M)|` for the kernel phase
/// `Phi(n) = 2 pi x n / L - 4 pi^2 t n^2 / L^2`, with `s1` the smallest phase
/// increment measured modulo `2 pi` (the quantity the Abel summation divides
/// by) and `s2` the largest second difference.
pub fn oscillatory_sum_check(x: f64, t: f64, l: f64, f: &dyn Fn(f64) -> f64, m: f64) -> OscillatoryReport {
    let phi = |k: f64| 2.0 * PI * x * k / l - 4.0 * PI * PI * t * k * k / (l * l);
    let r = (2.0 * m).floor() as i64;
    let value = ((-r..=r)
        .map(|k| {
            let w = f(k as f64 / m);
            Complex64::from_polar(w, phi(k as f64))
        })
        .sum::<Complex64>()
        / l)
        .norm();
    let wrapped = |d: f64| {
        let y = d.rem_euclid(2.0 * PI);
        y.min(2.0 * PI - y)
    };
    let s1 = (-r - 1..=r).map(|k| wrapped(phi(k as f64 + 1.0) - phi(k as f64))).fold(f64::INFINITY, f64::min);
    let s2 = (-r..=r)
        .map(|k| {
            let k = k as f64;
            (phi(k + 1.0) - 2.0 * phi(k) + phi(k - 1.0)).abs()
        })
        .fold(0.0, f64::max);
    let vacuous = s1 <= f64::EPSILON;
    let bound = if vacuous { f64::INFINITY } else { 1.0 / (l * s1) + m * s2 / (l * s1 * s1) };
    OscillatoryReport { value, bound, s1, s2, vacuous }
}

use crate::error::{invalid, Result};
use crate::propagators::Trajectory;
use crate::spectral_core::SpectralField;

/// A measured quantity with its resolution and a discretization-error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub label: String,
    pub value: f64,
    pub params: Vec<(String, f64)>,
    /// (spatial points, time samples)
    pub resolution: (usize, usize),
    pub quadrature_error_estimate: f64,
    pub converged: bool,
}

impl NormReport {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            value,
            params: Vec::new(),
            resolution: (0, 0),
            quadrature_error_estimate: 0.0,
            converged: true,
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}

fn time_norm(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        let p: Vec<f64> = values.iter().map(|v| v.powf(q)).collect();
        trapezoid(times, &p).powf(1.0 / q)
    }
}

/// Every other sample, always keeping the last one.
fn coarsen<T: Copy>(v: &[T]) -> Vec<T> {
    let mut out: Vec<T> = v.iter().step_by(2).copied().collect();
    if v.len() % 2 == 0 {
        out.push(v[v.len() - 1]);
    }
    out
}

/// `||u||_{L^q_t L^r_x}`: node quadrature in x, trapezoid in t (max for `q = inf`).
pub fn spacetime_norm(traj: &Trajectory, q: f64, r: f64) -> Result<NormReport> {
    if traj.len() < 2 {
        return Err(invalid("trajectory", "needs at least two samples"));
    }
    if !(q >= 1.0) || !(r >= 1.0) {
        return Err(invalid("q, r", format!("exponents must lie in [1, inf], got ({q}, {r})")));
    }
    let xs: Vec<f64> = traj.snapshots().iter().map(|s| lp(s, r)).collect();
    let value = time_norm(traj.times(), &xs, q);
    let err = if traj.len() >= 3 {
        (value - time_norm(&coarsen(traj.times()), &coarsen(&xs), q)).abs()
    } else {
        0.0
    };
    let mut rep = NormReport::new(format!("L^{q}_t L^{r}_x"), value).with_param("q", q).with_param("r", r);
    rep.resolution = (traj.grid().points(), traj.len());
    rep.quadrature_error_estimate = err;
    Ok(rep)
}

fn lp(s: &SpectralField, r: f64) -> f64 {
    s.lp_norm(r).expect("exponent checked")
}

/// `||u||_{C^0_t L^2_x} + ||u||_{L^5_t L^10_x}`.
pub fn strichartz_s(traj: &Trajectory) -> Result<NormReport> {
    let a = spacetime_norm(traj, f64::INFINITY, 2.0)?;
    let b = spacetime_norm(traj, 5.0, 10.0)?;
    let mut rep = NormReport::new("S", a.value + b.value)
        .with_param("sup_l2", a.value)
        .with_param("l5_l10", b.value);
    rep.resolution = a.resolution;
    rep.quadrature_error_estimate = a.quadrature_error_estimate + b.quadrature_error_estimate;
    Ok(rep)
}

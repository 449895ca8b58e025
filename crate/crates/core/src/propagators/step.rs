use num_complex::Complex64;

use super::model::{ModelSpec, Nonlinearity, PhaseWeight};
use super::trajectory::{RunMeta, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::spectral_core::{synthesize, SpectralField, TorusGrid};

/// Default `dt = T * 2^-DEFAULT_DT_EXPONENT`.
pub const DEFAULT_DT_EXPONENT: i32 = 14;
const AUTO_MASS_TOLERANCE: f64 = 1e-9;
const AUTO_MAX_HALVINGS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Half linear step, exact pointwise phase, half linear step.
    StrangExact,
    /// Classical RK4 in the interaction picture (Lawson).
    LawsonRk4,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::StrangExact => "strang_exact",
            Self::LawsonRk4 => "lawson_rk4",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Self::StrangExact => 2,
            Self::LawsonRk4 => 4,
        }
    }

    /// Exact splitting where the nonlinearity allows it, Lawson otherwise.
    pub fn for_model(model: &ModelSpec) -> Self {
        if model.is_pointwise() {
            Self::StrangExact
        } else {
            Self::LawsonRk4
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepScheme {
    pub kind: SchemeKind,
    pub dt: f64,
}

impl StepScheme {
    pub fn new(kind: SchemeKind, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        Ok(Self { kind, dt })
    }
}

fn phases(grid: &TorusGrid, t: f64) -> Vec<Complex64> {
    let c = -4.0 * std::f64::consts::PI.powi(2) * t;
    grid.frequencies().into_iter().map(|xi| Complex64::from_polar(1.0, c * xi * xi)).collect()
}

fn times_phase(u: &SpectralField, ph: &[Complex64]) -> SpectralField {
    let mut v = u.clone();
    for (c, p) in v.coefficients_mut().iter_mut().zip(ph) {
        *c *= p;
    }
    v
}

/// `e^{i t d_xx}`: `u_hat_k -> exp(-4 pi^2 i t xi_k^2) u_hat_k`.
pub fn linear_flow(field: &SpectralField, t: f64) -> SpectralField {
    if t == 0.0 {
        return field.clone();
    }
    times_phase(field, &phases(field.grid(), t))
}

/// Exact flow of `i u_t = w(x) |u|^4 u` over `dt`, node by node.
pub fn quintic_phase_substep(field: &SpectralField, dt: f64, weight: &PhaseWeight) -> SpectralField {
    if dt == 0.0 {
        return field.clone();
    }
    let mut s = field.samples();
    for (j, z) in s.iter_mut().enumerate() {
        let w = match weight {
            PhaseWeight::Uniform(w) => *w,
            PhaseWeight::Nodes(v) => v[j],
        };
        let a = z.norm_sqr();
        *z *= Complex64::from_polar(1.0, -w * a * a * dt);
    }
    synthesize(field.grid(), &s).expect("sample count matches grid")
}

/// One integrator with every step-size-dependent factor precomputed.
pub(crate) struct Stepper {
    kind: SchemeKind,
    h: f64,
    nonlinearity: Nonlinearity,
    weight: Option<PhaseWeight>,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    forcing: Option<SpectralField>,
}

impl Stepper {
    pub(crate) fn new(
        model: &ModelSpec,
        grid: &TorusGrid,
        kind: SchemeKind,
        h: f64,
        forcing: Option<SpectralField>,
    ) -> Result<Self> {
        model.validate()?;
        let weight = model.phase_weight(&grid.nodes());
        if kind == SchemeKind::StrangExact && (weight.is_none() || forcing.is_some()) {
            return Err(Error::SchemeMismatch { scheme: kind.name(), model: model.name() });
        }
        if let Some(f) = &forcing {
            if f.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok(Self {
            kind,
            h,
            nonlinearity: Nonlinearity::new(model, grid),
            weight,
            full: phases(grid, h),
            half: phases(grid, 0.5 * h),
            forcing,
        })
    }

    /// `f(u) = -i (N(u) + F)`.
    fn rhs(&self, u: &SpectralField) -> SpectralField {
        let mut n = self.nonlinearity.apply(u);
        if let Some(f) = &self.forcing {
            for (c, e) in n.coefficients_mut().iter_mut().zip(f.coefficients()) {
                *c += e;
            }
        }
        n.scaled(Complex64::new(0.0, -1.0))
    }

    pub(crate) fn advance(&self, u: &SpectralField) -> SpectralField {
        match self.kind {
            SchemeKind::StrangExact => {
                let w = self.weight.as_ref().expect("checked in new");
                let v = times_phase(u, &self.half);
                let v = quintic_phase_substep(&v, self.h, w);
                times_phase(&v, &self.half)
            }
            SchemeKind::LawsonRk4 => {
                let h = self.h;
                let c = |x: f64| Complex64::new(x, 0.0);
                let eu_half = times_phase(u, &self.half);
                let k1 = self.rhs(u);
                let ek1_half = times_phase(&k1, &self.half);
                let k2 = self.rhs(&eu_half.axpy(c(0.5 * h), &ek1_half).expect("same grid"));
                let k3 = self.rhs(&eu_half.axpy(c(0.5 * h), &k2).expect("same grid"));
                let eu = times_phase(u, &self.full);
                let ek3_half = times_phase(&k3, &self.half);
                let k4 = self.rhs(&eu.axpy(c(h), &ek3_half).expect("same grid"));
                let mid = times_phase(&k2.add(&k3).expect("same grid"), &self.half);
                let ek1 = times_phase(&k1, &self.full);
                let mut out = eu;
                let w = h / 6.0;
                for (((o, a), b), d) in out
                    .coefficients_mut()
                    .iter_mut()
                    .zip(ek1.coefficients())
                    .zip(mid.coefficients())
                    .zip(k4.coefficients())
                {
                    *o += w * (a + 2.0 * b + d);
                }
                out
            }
        }
    }
}

/// One step of size `scheme.dt`.
pub fn step(field: &SpectralField, model: &ModelSpec, scheme: &StepScheme) -> Result<SpectralField> {
    StepScheme::new(scheme.kind, scheme.dt)?;
    let out = Stepper::new(model, field.grid(), scheme.kind, scheme.dt, None)?.advance(field);
    if !out.is_finite() {
        return Err(Error::NonFinite { step: 1, time: scheme.dt });
    }
    Ok(out)
}

fn step_count(t_final: f64, dt: f64) -> usize {
    let r = t_final / dt;
    let n = r.round();
    if (r - n).abs() <= 1e-9 * r.max(1.0) {
        (n as usize).max(1)
    } else {
        (r.ceil() as usize).max(1)
    }
}

fn run(
    stepper: &Stepper,
    u0: &SpectralField,
    steps: usize,
    h: f64,
    sample_stride: usize,
    meta: Option<RunMeta>,
) -> Result<Trajectory> {
    let mut times = vec![0.0];
    let mut snaps = vec![u0.clone()];
    let mut u = u0.clone();
    for s in 1..=steps {
        u = stepper.advance(&u);
        if !u.is_finite() {
            return Err(Error::NonFinite { step: s, time: s as f64 * h });
        }
        if s % sample_stride == 0 || s == steps {
            times.push(s as f64 * h);
            snaps.push(u.clone());
        }
    }
    Trajectory::new(u0.grid(), times, snaps, meta)
}

fn check_run_args(t_final: f64, sample_stride: usize) -> Result<()> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(invalid("T", format!("must be non-negative, got {t_final}")));
    }
    if sample_stride == 0 {
        return Err(invalid("sample_stride", "must be >= 1"));
    }
    Ok(())
}

/// Integrates to `t_final`, sampling every `sample_stride` steps plus the
/// endpoints. The step is shrunk to `t_final / ceil(t_final / dt)` when `dt`
/// does not divide `t_final`.
pub fn evolve(
    model: &ModelSpec,
    u0: &SpectralField,
    t_final: f64,
    scheme: &StepScheme,
    sample_stride: usize,
) -> Result<Trajectory> {
    check_run_args(t_final, sample_stride)?;
    StepScheme::new(scheme.kind, scheme.dt)?;
    if t_final == 0.0 {
        let meta = RunMeta { model: model.clone(), scheme: scheme.kind, dt: scheme.dt };
        return Trajectory::new(u0.grid(), vec![0.0], vec![u0.clone()], Some(meta));
    }
    let steps = step_count(t_final, scheme.dt);
    let h = t_final / steps as f64;
    let stepper = Stepper::new(model, u0.grid(), scheme.kind, h, None)?;
    let meta = RunMeta { model: model.clone(), scheme: scheme.kind, dt: h };
    run(&stepper, u0, steps, h, sample_stride, Some(meta))
}

/// `evolve` at the default step `T * 2^-14`, halving (at most four times)
/// until the sampled relative mass drift is below `1e-9`.
pub fn evolve_auto(
    model: &ModelSpec,
    u0: &SpectralField,
    t_final: f64,
    kind: SchemeKind,
    samples: usize,
) -> Result<Trajectory> {
    check_run_args(t_final, samples.max(1))?;
    if t_final == 0.0 {
        return evolve(model, u0, 0.0, &StepScheme::new(kind, 1.0)?, 1);
    }
    let mut steps = 1usize << DEFAULT_DT_EXPONENT;
    let mut last = None;
    for _ in 0..=AUTO_MAX_HALVINGS {
        let dt = t_final / steps as f64;
        let stride = (steps / samples.max(1)).max(1);
        let traj = evolve(model, u0, t_final, &StepScheme::new(kind, dt)?, stride)?;
        if traj.mass_drift() < AUTO_MASS_TOLERANCE {
            return Ok(traj);
        }
        last = Some(traj);
        steps *= 2;
    }
    Ok(last.expect("at least one attempt"))
}

/// Lawson integration of `i u_t + u_xx = N(u) + forcing` (time-independent forcing).
pub fn evolve_forced(
    model: &ModelSpec,
    u0: &SpectralField,
    forcing: &SpectralField,
    t_final: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    check_run_args(t_final, sample_stride)?;
    StepScheme::new(SchemeKind::LawsonRk4, dt)?;
    let steps = step_count(t_final, dt);
    let h = t_final / steps as f64;
    let stepper = Stepper::new(model, u0.grid(), SchemeKind::LawsonRk4, h, Some(forcing.clone()))?;
    run(&stepper, u0, steps, h, sample_stride, None)
}

/// `|| evolve backward(evolve forward(u0)) - u0 ||_{L^2}` with identical steps.
pub fn reverse_check(model: &ModelSpec, u0: &SpectralField, t_final: f64, scheme: &StepScheme) -> Result<f64> {
    check_run_args(t_final, 1)?;
    StepScheme::new(scheme.kind, scheme.dt)?;
    if t_final == 0.0 {
        return Ok(0.0);
    }
    let steps = step_count(t_final, scheme.dt);
    let h = t_final / steps as f64;
    let fwd = Stepper::new(model, u0.grid(), scheme.kind, h, None)?;
    let bwd = Stepper::new(model, u0.grid(), scheme.kind, -h, None)?;
    let mut u = u0.clone();
    for s in 1..=steps {
        u = fwd.advance(&u);
        if !u.is_finite() {
            return Err(Error::NonFinite { step: s, time: s as f64 * h });
        }
    }
    for _ in 0..steps {
        u = bwd.advance(&u);
    }
    u.distance(u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles;
    use crate::spectral_core::{make_grid, MultiplierSymbol};

    #[test]
    fn linear_flow_identity_and_mode_phase() {
        let g = make_grid(5.0, 32).unwrap();
        let u = profiles::gaussian(&g, 1.0, 0.3, 0.7, 0.0);
        assert_eq!(linear_flow(&u, 0.0).coefficients(), u.coefficients());
        let k = 3;
        let m = SpectralField::mode(&g, k, Complex64::new(1.0, 0.0)).unwrap();
        let t = 0.37;
        let want = Complex64::from_polar(1.0, -4.0 * std::f64::consts::PI.powi(2) * t * (k * k) as f64 / 25.0);
        assert!((linear_flow(&m, t).coefficient(k) - want).norm() < 1e-14);
    }

    #[test]
    fn phase_substep_examples() {
        let g = make_grid(2.0, 16).unwrap();
        let c = Complex64::new(0.9, 0.3);
        let u = SpectralField::from_fn(&g, |_| c);
        let dt = 0.21;
        let v = quintic_phase_substep(&u, dt, &PhaseWeight::Uniform(1.0));
        let want = c * Complex64::from_polar(1.0, -c.norm_sqr().powi(2) * dt);
        assert!((v.coefficient(0) - want).norm() < 1e-14);
        let w = quintic_phase_substep(&u, 0.0, &PhaseWeight::Uniform(1.0));
        assert_eq!(w.coefficients(), u.coefficients());
    }

    #[test]
    fn projected_models_refuse_strang() {
        let g = make_grid(8.0, 32).unwrap();
        let u = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.0);
        let s = StepScheme::new(SchemeKind::StrangExact, 0.01).unwrap();
        let err = step(&u, &ModelSpec::DTruncated { d: 4 }, &s).unwrap_err();
        assert!(matches!(err, Error::SchemeMismatch { .. }));
        let id = ModelSpec::AlphaTruncated { alpha: 0.5, symbol: MultiplierSymbol::Identity };
        assert!(step(&u, &id, &s).is_ok());
        assert!(StepScheme::new(SchemeKind::LawsonRk4, 0.0).is_err());
    }

    #[test]
    fn free_evolution_is_linear_flow() {
        let g = make_grid(16.0, 128).unwrap();
        let u = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.5);
        for kind in [SchemeKind::StrangExact, SchemeKind::LawsonRk4] {
            let tr = evolve(&ModelSpec::Free, &u, 1.0, &StepScheme::new(kind, 0.125).unwrap(), 2).unwrap();
            assert_eq!(tr.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
            for (t, s) in tr.times().iter().zip(tr.snapshots()) {
                assert!(s.distance(&linear_flow(&u, *t)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn blow_up_is_detected() {
        let g = make_grid(1.0, 8).unwrap();
        let u = SpectralField::from_fn(&g, |_| Complex64::new(1e80, 0.0));
        let s = StepScheme::new(SchemeKind::LawsonRk4, 0.1).unwrap();
        let err = evolve(&ModelSpec::DTruncated { d: 2 }, &u, 1.0, &s, 1).unwrap_err();
        assert!(matches!(err, Error::NonFinite { step: 1, .. }));
    }

    #[test]
    fn free_reversal_is_exact() {
        let g = make_grid(10.0, 64).unwrap();
        let u = profiles::sech(&g, 1.0, 0.0, 1.0);
        let s = StepScheme::new(SchemeKind::LawsonRk4, 0.01).unwrap();
        assert!(reverse_check(&ModelSpec::Free, &u, 1.0, &s).unwrap() < 1e-12);
    }

    #[test]
    fn step_count_rounds_sensibly() {
        assert_eq!(step_count(1.0, 0.25), 4);
        assert_eq!(step_count(1.0, 0.3), 4);
        assert_eq!(step_count(1.0, 1.0 / 3.0), 3);
    }
}

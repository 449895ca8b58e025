use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::norms::NormReport;
use crate::error::{invalid, Error, Result};
use crate::seed::SeedStream;
use crate::spectral_core::{apply_multiplier, synthesize, MultiplierSymbol, SpectralField, TorusGrid};
use crate::symmetries::{periodic_extension, pull_back, push_forward};

/// Largest grid on which the dense singular-value oracle also runs.
pub const DENSE_ORACLE_MAX_POINTS: usize = 512;

/// An operator on `L^2` of one grid, built from primitives.
#[derive(Clone, Debug)]
pub enum OperatorSpec {
    Identity,
    Multiplier(MultiplierSymbol),
    /// Node-wise real function.
    Mask(Vec<f64>),
    /// Applied right to left: `[A, B, C]` is `A B C`.
    Compose(Vec<OperatorSpec>),
    Difference(Box<OperatorSpec>, Box<OperatorSpec>),
    Commutator(Box<OperatorSpec>, Box<OperatorSpec>),
    /// `p^*_window  inner  p_*`: a torus operator seen from the line.
    Periodized { torus: TorusGrid, window: (f64, f64), inner: Box<OperatorSpec> },
}

impl OperatorSpec {
    pub fn compose(ops: Vec<OperatorSpec>) -> Self {
        Self::Compose(ops)
    }

    pub fn difference(a: OperatorSpec, b: OperatorSpec) -> Self {
        Self::Difference(Box::new(a), Box::new(b))
    }

    pub fn commutator(a: OperatorSpec, b: OperatorSpec) -> Self {
        Self::Commutator(Box::new(a), Box::new(b))
    }

    /// Checks that every mask matches `grid` and symbols are valid.
    pub fn check(&self, grid: &TorusGrid) -> Result<()> {
        match self {
            Self::Identity => Ok(()),
            Self::Multiplier(s) => s.validate(),
            Self::Mask(m) if m.len() != grid.points() => {
                Err(Error::LengthMismatch { expected: grid.points(), got: m.len() })
            }
            Self::Mask(m) if m.iter().any(|v| !v.is_finite()) => Err(invalid("mask", "non-finite value")),
            Self::Mask(_) => Ok(()),
            Self::Compose(v) => v.iter().try_for_each(|o| o.check(grid)),
            Self::Difference(a, b) | Self::Commutator(a, b) => {
                a.check(grid)?;
                b.check(grid)
            }
            Self::Periodized { torus, inner, .. } => {
                push_forward(&SpectralField::zeros(grid), torus)?;
                inner.check(torus)
            }
        }
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        self.act(f, false)
    }

    pub fn apply_adjoint(&self, f: &SpectralField) -> Result<SpectralField> {
        self.act(f, true)
    }

    fn act(&self, f: &SpectralField, adjoint: bool) -> Result<SpectralField> {
        Ok(match self {
            Self::Identity => f.clone(),
            Self::Multiplier(s) => apply_multiplier(f, s),
            Self::Mask(m) => f.masked(m)?,
            Self::Compose(ops) => {
                let mut g = f.clone();
                if adjoint {
                    for o in ops {
                        g = o.act(&g, true)?;
                    }
                } else {
                    for o in ops.iter().rev() {
                        g = o.act(&g, false)?;
                    }
                }
                g
            }
            Self::Difference(a, b) => a.act(f, adjoint)?.sub(&b.act(f, adjoint)?)?,
            Self::Commutator(a, b) => {
                // [A, B]* = [B*, A*]
                let (p, q) = if adjoint { (b, a) } else { (a, b) };
                let pq = p.act(&q.act(f, adjoint)?, adjoint)?;
                let qp = q.act(&p.act(f, adjoint)?, adjoint)?;
                pq.sub(&qp)?
            }
            Self::Periodized { torus, window, inner } => {
                let line = f.grid();
                if adjoint {
                    let (a, b) = *window;
                    let ind: Vec<f64> =
                        line.nodes().iter().map(|y| f64::from(u8::from(*y >= a && *y < b))).collect();
                    let t = push_forward(&f.masked(&ind)?, torus)?;
                    periodic_extension(&inner.act(&t, true)?, line)?
                } else {
                    pull_back(&inner.act(&push_forward(f, torus)?, false)?, *window, line)?
                }
            }
        })
    }
}

fn random_field(grid: &TorusGrid, seed: u64) -> SpectralField {
    let mut rng = SeedStream::new(seed).rng(0);
    let s: Vec<Complex64> = (0..grid.points())
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    synthesize(grid, &s).expect("sample count matches grid")
}

/// Power iteration on `A* A`. The estimates `||A v_k||` form a nondecreasing
/// sequence of lower bounds; the run stops once consecutive values agree to
/// `1e-10` relative (flagged as converged). On grids of at most
/// `DENSE_ORACLE_MAX_POINTS` nodes the dense oracle value is attached as
/// parameter `dense`.
pub fn operator_norm_l2(op: &OperatorSpec, grid: &TorusGrid, iterations: usize, seed: u64) -> Result<NormReport> {
    if iterations < 20 {
        return Err(invalid("iterations", format!("need at least 20, got {iterations}")));
    }
    op.check(grid)?;
    let mut v = random_field(grid, seed);
    v = v.scaled(Complex64::new(1.0 / v.norm(), 0.0));
    let (mut est, mut prev, mut converged, mut used) = (0.0, 0.0, false, 0);
    for it in 0..iterations {
        used = it + 1;
        let w = op.apply(&v)?;
        est = w.norm();
        if est == 0.0 {
            converged = true;
            break;
        }
        if it > 0 && (est - prev).abs() <= 1e-10 * est {
            converged = true;
            break;
        }
        prev = est;
        let z = op.apply_adjoint(&w)?;
        let zn = z.norm();
        if zn == 0.0 {
            converged = true;
            break;
        }
        v = z.scaled(Complex64::new(1.0 / zn, 0.0));
    }
    let mut rep = NormReport::new("operator_norm_l2", est).with_param("iterations", used as f64);
    if grid.points() <= DENSE_ORACLE_MAX_POINTS {
        rep = rep.with_param("dense", dense_operator_norm(op, grid)?);
    }
    rep.resolution = (grid.points(), used);
    rep.quadrature_error_estimate = (est - prev).abs();
    rep.converged = converged;
    Ok(rep)
}

/// Largest singular value of the full node-basis matrix of `op`.
pub fn dense_operator_norm(op: &OperatorSpec, grid: &TorusGrid) -> Result<f64> {
    let n = grid.points();
    if n > DENSE_ORACLE_MAX_POINTS {
        return Err(invalid("grid", format!("dense oracle limited to {DENSE_ORACLE_MAX_POINTS} points, got {n}")));
    }
    op.check(grid)?;
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let col = op.apply(&synthesize(grid, &e)?)?.samples();
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    Ok(a.singular_values().iter().copied().fold(0.0, f64::max))
}

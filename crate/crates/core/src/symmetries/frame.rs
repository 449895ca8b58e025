use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::propagators::linear_flow;
use crate::spectral_core::{synthesize, SpectralField, TorusGrid};

/// `(scale, boost, translation, time_shift)` plus a constant gauge phase.
///
/// `g f(x) = e^{i gauge} scale^{-1/2} e^{2 pi i boost x} f((x - translation) / scale)`
/// and `G = g e^{i time_shift d_xx}`. The boost is in cycles per unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryFrame {
    pub scale: f64,
    pub boost: f64,
    pub translation: f64,
    pub time_shift: f64,
    pub gauge: f64,
}

/// A frame snapped to a grid: dyadic scale exponent, lattice boost, node shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeFrame {
    pub scale_exponent: i32,
    pub boost_index: i64,
    pub shift_nodes: i64,
    /// `boost - boost_index / L`.
    pub boost_residual: f64,
    /// `translation - shift_nodes * dx`.
    pub translation_residual: f64,
}

impl SymmetryFrame {
    pub fn new(scale: f64, boost: f64, translation: f64, time_shift: f64) -> Self {
        Self { scale, boost, translation, time_shift, gauge: 0.0 }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    /// Exact inverse of `G` in the group (gauge phase included).
    pub fn inverse(&self) -> Self {
        let (l, b, x, t) = (self.scale, self.boost, self.translation, self.time_shift);
        Self {
            scale: 1.0 / l,
            boost: -l * b,
            translation: -x / l + 4.0 * PI * l * b * t,
            time_shift: -t * l * l,
            gauge: -self.gauge - 2.0 * PI * b * x + 4.0 * PI * PI * l * l * b * b * t,
        }
    }

    pub fn on_grid(&self, grid: &TorusGrid) -> Result<LatticeFrame> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid("scale", format!("must be positive, got {}", self.scale)));
        }
        let e = self.scale.log2();
        let m = e.round();
        if (e - m).abs() > 1e-12 {
            return Err(Error::IncompatibleGrids(format!("scale {} is not a power of two", self.scale)));
        }
        let m = m as i32;
        if m.unsigned_abs() as usize >= grid.points().trailing_zeros() as usize - 2 {
            return Err(Error::IncompatibleGrids(format!(
                "scale 2^{m} too large for {} points",
                grid.points()
            )));
        }
        let k0 = (self.boost * grid.length()).round();
        let j0 = (self.translation / grid.dx()).round();
        Ok(LatticeFrame {
            scale_exponent: m,
            boost_index: k0 as i64,
            shift_nodes: j0 as i64,
            boost_residual: self.boost - k0 / grid.length(),
            translation_residual: self.translation - j0 * grid.dx(),
        })
    }
}

fn rescale(field: &SpectralField, m: i32) -> SpectralField {
    let grid = field.grid();
    let n = grid.points();
    if m == 0 {
        return field.clone();
    }
    if m > 0 {
        // Dilation: g_hat_k = lambda^{1/2} f_hat_{lambda k}.
        let lam = 1i64 << m;
        let root = (lam as f64).sqrt();
        let mut out = SpectralField::zeros(grid);
        for i in 0..n {
            let k = grid.wavenumber(i) * lam;
            out.coefficients_mut()[i] = field.coefficient(k) * root;
        }
        out
    } else {
        // Compression: node sampling g(x_j) = lambda^{-1/2} f(x_j / lambda).
        let step = 1i64 << (-m);
        let root = (step as f64).sqrt();
        let s = field.samples();
        let half = (n / 2) as i64;
        let out: Vec<Complex64> = (0..n as i64)
            .map(|j| {
                let i = (j - half) * step + half;
                if (0..n as i64).contains(&i) {
                    s[i as usize] * root
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        synthesize(grid, &out).expect("sample count matches grid")
    }
}

/// `g f` with lattice-rounded boost and translation (exactly unitary for
/// those two; the dyadic rescaling assumes `f` is localized and band-limited
/// enough for the target window).
pub fn apply_g(frame: &SymmetryFrame, field: &SpectralField) -> Result<SpectralField> {
    let grid = field.grid();
    let lf = frame.on_grid(grid)?;
    let v = rescale(field, lf.scale_exponent);
    let n = grid.points() as i64;
    let shift = 2.0 * PI * lf.shift_nodes as f64 / n as f64;
    let gauge = Complex64::from_polar(1.0, frame.gauge);
    let mut out = SpectralField::zeros(grid);
    for (i, c) in v.coefficients().iter().enumerate() {
        let k = grid.wavenumber(i);
        let z = c * Complex64::from_polar(1.0, -shift * k as f64) * gauge;
        let target = (i as i64 + lf.boost_index).rem_euclid(n) as usize;
        out.coefficients_mut()[target] = z;
    }
    Ok(out)
}

/// `G f = g e^{i t0 d_xx} f`.
#[allow(non_snake_case)]
pub fn apply_G(frame: &SymmetryFrame, field: &SpectralField) -> Result<SpectralField> {
    apply_g(frame, &linear_flow(field, frame.time_shift))
}

/// A space-time function that can be evaluated anywhere.
pub trait TrajectorySampler {
    fn sample(&self, t: f64, x: f64) -> Complex64;
}

impl<F: Fn(f64, f64) -> Complex64> TrajectorySampler for F {
    fn sample(&self, t: f64, x: f64) -> Complex64 {
        self(t, x)
    }
}

/// `(t, x) -> (e^{i t d_xx} f)(x)`, evaluated by the trigonometric series.
#[derive(Clone, Debug)]
pub struct FreeSampler {
    field: SpectralField,
}

impl FreeSampler {
    pub fn new(field: SpectralField) -> Self {
        Self { field }
    }
}

impl TrajectorySampler for FreeSampler {
    fn sample(&self, t: f64, x: f64) -> Complex64 {
        let g = self.field.grid();
        self.field
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let xi = g.frequency(i);
                c * Complex64::from_polar(1.0, 2.0 * PI * xi * x - 4.0 * PI * PI * xi * xi * t)
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct TransformedSampler<S> {
    frame: SymmetryFrame,
    inner: S,
}

impl<S: TrajectorySampler> TrajectorySampler for TransformedSampler<S> {
    fn sample(&self, t: f64, x: f64) -> Complex64 {
        let f = &self.frame;
        let phase = f.gauge + 2.0 * PI * f.boost * x - 4.0 * PI * PI * f.boost * f.boost * t;
        let tt = f.time_shift + t / (f.scale * f.scale);
        let xx = (x - f.translation - 4.0 * PI * f.boost * t) / f.scale;
        self.inner.sample(tt, xx) * Complex64::from_polar(f.scale.powf(-0.5), phase)
    }
}

/// `T F(t, x) = l^{-1/2} e^{2 pi i b x} e^{-4 pi^2 i b^2 t} F(t0 + t / l^2, (x - x0 - 4 pi b t) / l)`,
/// the form for which `e^{i t d_xx} G f = T[e^{i t d_xx} f]` holds.
pub fn apply_t<S: TrajectorySampler>(frame: &SymmetryFrame, sampler: S) -> TransformedSampler<S> {
    TransformedSampler { frame: *frame, inner: sampler }
}

/// The five-term sum of the orthogonality definition, evaluated as written.
pub fn orthogonality_defect(a: &SymmetryFrame, b: &SymmetryFrame) -> f64 {
    let (lj, lk) = (a.scale, b.scale);
    let dxi = a.boost - b.boost;
    lk / lj
        + lj / lk
        + lj * lk * dxi * dxi
        + (lj * lj * a.time_shift - lk * lk * b.time_shift).abs() / (lj * lk)
        + (a.translation - b.translation - 2.0 * a.time_shift * lj * lj * dxi).powi(2) / (lj * lk)
}

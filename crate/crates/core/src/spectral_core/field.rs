use num_complex::Complex64;

use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[inline]
fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One complex Fourier coefficient per lattice mode, in FFT order.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

/// Physical node samples to Fourier coefficients.
pub fn synthesize(grid: &TorusGrid, samples: &[Complex64]) -> Result<SpectralField> {
    let n = grid.points();
    if samples.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: samples.len() });
    }
    let mut buf = samples.to_vec();
    grid.fft_forward(&mut buf);
    let scale = 1.0 / n as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= scale * parity(grid.wavenumber(i));
    }
    Ok(SpectralField { grid: grid.clone(), coeffs: buf })
}

/// Fourier coefficients to physical node samples.
pub fn analyze(field: &SpectralField) -> Vec<Complex64> {
    field.samples()
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.points()] }
    }

    pub fn from_coefficients(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::LengthMismatch { expected: grid.points(), got: coeffs.len() });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Samples `f` at the nodes and transforms.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let samples: Vec<Complex64> = grid.nodes().into_iter().map(f).collect();
        synthesize(grid, &samples).expect("sample count matches grid")
    }

    /// Single lattice mode `amplitude * exp(2 pi i k x / L)`.
    pub fn mode(grid: &TorusGrid, k: i64, amplitude: Complex64) -> Result<Self> {
        let i = grid
            .index_of(k)
            .ok_or_else(|| crate::error::invalid("k", format!("mode {k} is not resolved")))?;
        let mut f = Self::zeros(grid);
        f.coeffs[i] = amplitude;
        Ok(f)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.grid.index_of(k).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn samples(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * parity(self.grid.wavenumber(i)))
            .collect();
        self.grid.fft_inverse(&mut buf);
        buf
    }

    /// Samples on the 3x zero-padded grid (see `TorusGrid::padded_nodes`).
    pub fn padded_samples(&self) -> Vec<Complex64> {
        let m = self.grid.padded_points();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavenumber(i);
            let j = if k >= 0 { k as usize } else { (k + m as i64) as usize };
            buf[j] = c * parity(k);
        }
        self.grid.fft_inverse_padded(&mut buf);
        buf
    }

    /// Transforms padded samples and truncates to the grid's modes.
    pub fn from_padded_samples(grid: &TorusGrid, mut buf: Vec<Complex64>) -> Result<Self> {
        let m = grid.padded_points();
        if buf.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: buf.len() });
        }
        grid.fft_forward_padded(&mut buf);
        let scale = 1.0 / m as f64;
        let coeffs = (0..grid.points())
            .map(|i| {
                let k = grid.wavenumber(i);
                let j = if k >= 0 { k as usize } else { (k + m as i64) as usize };
                buf[j] * (scale * parity(k))
            })
            .collect();
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, x: f64) -> Complex64 {
        let w = 2.0 * std::f64::consts::PI * x;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::from_polar(1.0, w * self.grid.frequency(i)))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// `integral of f * conj(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_grid(other)?;
        let s: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.length())
    }

    /// `L^p` norm by node quadrature; `p = f64::INFINITY` gives the sup over nodes.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(crate::error::invalid("p", format!("{p} is not in [1, inf]")));
        }
        Ok(lp_of_samples(&self.samples(), p, self.grid.dx()))
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map_coefficients(|_, z| z * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: Complex64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + a * y).collect();
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    /// `L^2` distance.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Applies `f(xi, coefficient)` mode by mode.
    pub fn map_coefficients(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(self.grid.frequency(i), c))
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Multiplies node values by a real mask.
    pub fn masked(&self, mask: &[f64]) -> Result<Self> {
        if mask.len() != self.grid.points() {
            return Err(Error::LengthMismatch { expected: self.grid.points(), got: mask.len() });
        }
        let s: Vec<Complex64> = self.samples().iter().zip(mask).map(|(u, m)| u * m).collect();
        synthesize(&self.grid, &s)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Mass carried by modes with |xi| > `cutoff`.
    pub fn mass_above(&self, cutoff: f64) -> f64 {
        let l = self.grid.length();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.frequency(*i).abs() > cutoff)
            .map(|(_, c)| l * c.norm_sqr())
            .sum()
    }
}

pub(crate) fn lp_of_samples(samples: &[Complex64], p: f64, dx: f64) -> f64 {
    if p.is_infinite() {
        samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    } else {
        (dx * samples.iter().map(|c| c.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

//! Closed-form initial data.

use num_complex::Complex64;

use crate::spectral_core::{SpectralField, TorusGrid};

/// `amplitude * exp(-(x - center)^2 / (2 width^2)) * exp(2 pi i boost x)`.
pub fn gaussian(grid: &TorusGrid, amplitude: f64, center: f64, width: f64, boost: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x| {
        let y = grid.wrap(x - center);
        let env = amplitude * (-0.5 * (y / width).powi(2)).exp();
        Complex64::from_polar(env, 2.0 * std::f64::consts::PI * boost * x)
    })
}

/// `amplitude * sech((x - center) / width)`.
pub fn sech(grid: &TorusGrid, amplitude: f64, center: f64, width: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x| {
        let y = grid.wrap(x - center) / width;
        Complex64::new(amplitude / y.cosh(), 0.0)
    })
}

/// `amplitude / (1 + ((x - center) / width)^2)`. The algebraic tail makes
/// overlaps with distant test functions decay like a power of the distance.
pub fn lorentzian(grid: &TorusGrid, amplitude: f64, center: f64, width: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x| {
        let y = grid.wrap(x - center) / width;
        Complex64::new(amplitude / (1.0 + y * y), 0.0)
    })
}

/// `amplitude * exp(2 pi i k x / L)`.
pub fn plane_wave(grid: &TorusGrid, amplitude: f64, k: i64) -> SpectralField {
    SpectralField::mode(grid, k, Complex64::new(amplitude, 0.0))
        .unwrap_or_else(|_| SpectralField::zeros(grid))
}

/// Rescales `field` to unit mass (zero stays zero).
pub fn normalized(field: &SpectralField) -> SpectralField {
    let m = field.norm();
    if m == 0.0 {
        field.clone()
    } else {
        field.scaled(Complex64::new(1.0 / m, 0.0))
    }
}

use num_complex::Complex64;

use super::norms::NormReport;
use crate::error::{invalid, Result};
use crate::propagators::HSpec;
use crate::spectral_core::{apply_multiplier, MultiplierSymbol, SpectralField, TorusGrid};

fn defect(h: &HSpec, n: u32, radius: f64, grid: &TorusGrid, derivative: bool) -> Result<NormReport> {
    h.validate()?;
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if !(radius > 0.0) {
        return Err(invalid("R", format!("must be positive, got {radius}")));
    }
    let periods = grid.length() * n as f64;
    if (periods - periods.round()).abs() > 1e-9 * periods {
        return Err(invalid("grid", format!("length {} is not a whole number of periods of h({n} x)", grid.length())));
    }
    let mean = h.mean();
    let f = SpectralField::from_fn(grid, |x| Complex64::new(h.eval(n as f64 * x) - mean, 0.0));
    let mut g = apply_multiplier(&f, &MultiplierSymbol::HelmholtzInverse);
    if derivative {
        g = g.map_coefficients(|xi, c| c * Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi));
    }
    let s = g.samples();
    let value = grid
        .nodes()
        .iter()
        .zip(&s)
        .filter(|(x, _)| x.abs() <= radius)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    let label = if derivative { "homogenization_defect_dx" } else { "homogenization_defect" };
    let mut rep = NormReport::new(label, value).with_param("n", n as f64).with_param("R", radius);
    rep.resolution = (grid.points(), 1);
    Ok(rep)
}

/// `sup_{|x| <= R} |(1 - d_xx)^{-1} (h(n x) - mean h)|`, on the given torus.
pub fn homogenization_defect(h: &HSpec, n: u32, radius: f64, grid: &TorusGrid) -> Result<NormReport> {
    defect(h, n, radius, grid, false)
}

/// Same with `d_x` applied after the Helmholtz inverse.
pub fn homogenization_defect_derivative(h: &HSpec, n: u32, radius: f64, grid: &TorusGrid) -> Result<NormReport> {
    defect(h, n, radius, grid, true)
}

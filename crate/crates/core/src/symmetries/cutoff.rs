use crate::error::{invalid, Error, Result};
use crate::spectral_core::{smoothstep, SpectralField, TorusGrid};

pub const CUTOFF_LEVELS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffParams {
    pub d: f64,
    pub k: f64,
    pub t: f64,
    pub eta: f64,
    /// Mass budget for `(1 - chi^j) u0`.
    pub eps: f64,
}

impl CutoffParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("D", self.d), ("K", self.k), ("T", self.t), ("eta", self.eta), ("eps", self.eps)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `D K T / eta`: the slope scale and the minimum support gap.
    pub fn scale(&self) -> f64 {
        self.d * self.k * self.t / self.eta
    }

    /// Ramp width. The quintic smoothstep peaks at slope 15/8 per width, so
    /// a width of `2 D K T / eta` keeps every slope under `eta / (D K T)`.
    pub fn unit(&self) -> f64 {
        2.0 * self.scale()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffReport {
    pub unit: f64,
    pub center: f64,
    pub max_slope: f64,
    pub slope_bound: f64,
    pub min_gap: f64,
    pub gap_bound: f64,
    /// `||(1 - chi^j) u0||_{L^2}` for each level.
    pub residuals: [f64; CUTOFF_LEVELS],
    /// `L / (20 * unit)`; the layout needs it above 1.
    pub length_ratio: f64,
}

/// Five nested cutoffs on one period `[c - L, c]` of the torus.
///
/// With unit `s`, level `j` equals 1 on `[c - L + (10 - 2j)s, c - (10 - 2j)s]`
/// and vanishes outside `[c - L + (9 - 2j)s, c - (9 - 2j)s]`.
#[derive(Clone, Debug)]
pub struct CutoffSet {
    grid: TorusGrid,
    params: CutoffParams,
    center: f64,
    masks: Vec<Vec<f64>>,
    report: CutoffReport,
}

fn level_value(a: f64, length: f64, s: f64, j: usize) -> f64 {
    let edge = (9.0 - 2.0 * j as f64) * s;
    let ramp = |d: f64| smoothstep((d - edge) / s);
    ramp(a) * ramp(length - a)
}

fn masks_for(grid: &TorusGrid, center: f64, s: f64) -> Vec<Vec<f64>> {
    let l = grid.length();
    let nodes = grid.nodes();
    (0..CUTOFF_LEVELS)
        .map(|j| nodes.iter().map(|x| level_value((x - (center - l)).rem_euclid(l), l, s, j)).collect())
        .collect()
}

fn residual(samples: &[num_complex::Complex64], mask: &[f64], dx: f64) -> f64 {
    (dx * samples.iter().zip(mask).map(|(u, m)| (1.0 - m).powi(2) * u.norm_sqr()).sum::<f64>()).sqrt()
}

/// Smallest circular distance from `{a_j}` to `{b_j}` (node flags).
fn circular_gap(a: &[bool], b: &[bool], dx: f64) -> f64 {
    let n = a.len();
    if !a.iter().any(|v| *v) || !b.iter().any(|v| *v) {
        return f64::INFINITY;
    }
    let mut dist = vec![usize::MAX; n];
    let mut last = None;
    for t in 0..2 * n {
        let j = t % n;
        if b[j] {
            last = Some(t);
        }
        if let Some(p) = last {
            dist[j] = dist[j].min(t - p);
        }
    }
    last = None;
    for t in (0..2 * n).rev() {
        let j = t % n;
        if b[j] {
            last = Some(t);
        }
        if let Some(p) = last {
            dist[j] = dist[j].min(p - t);
        }
    }
    (0..n).filter(|j| a[*j]).map(|j| dist[j]).min().expect("non-empty") as f64 * dx
}

/// Builds the cutoffs, choosing the window position `c` (a node, reduced to
/// `[0, L)`) that minimises `||(1 - chi^0) u0||`.
pub fn build_cutoffs(params: CutoffParams, u0: &SpectralField) -> Result<CutoffSet> {
    params.validate()?;
    let grid = u0.grid();
    let l = grid.length();
    let s = params.unit();
    let length_ratio = l / (20.0 * s);
    if length_ratio <= 1.0 {
        return Err(invalid(
            "L",
            format!("period {l} cannot hold five levels of unit {s:.4} (needs L > {:.4})", 20.0 * s),
        ));
    }
    let n = grid.points();
    let samples = u0.samples();
    let stride = (n / 512).max(1);
    let mut best = (f64::INFINITY, 0.0);
    for m in (0..n).step_by(stride) {
        let c = grid.node(m).rem_euclid(l);
        let nodes = grid.nodes();
        let mask: Vec<f64> = nodes.iter().map(|x| level_value((x - (c - l)).rem_euclid(l), l, s, 0)).collect();
        let r = residual(&samples, &mask, grid.dx());
        if r < best.0 {
            best = (r, c);
        }
    }
    let (best_residual, center) = best;
    if best_residual > params.eps {
        return Err(Error::NoLowMassWindow { best: best_residual, eps: params.eps });
    }
    let masks = masks_for(grid, center, s);
    let dx = grid.dx();
    let max_slope = masks
        .iter()
        .flat_map(|m| (0..n).map(move |j| (m[(j + 1) % n] - m[j]).abs() / dx))
        .fold(0.0, f64::max);
    let mut min_gap = f64::INFINITY;
    for i in 0..CUTOFF_LEVELS {
        for j in i + 1..CUTOFF_LEVELS {
            let a: Vec<bool> = masks[i].iter().map(|v| *v > 0.0).collect();
            let b: Vec<bool> = masks[j].iter().map(|v| *v < 1.0).collect();
            min_gap = min_gap.min(circular_gap(&a, &b, dx));
        }
    }
    let mut residuals = [0.0; CUTOFF_LEVELS];
    for (r, m) in residuals.iter_mut().zip(&masks) {
        *r = residual(&samples, m, dx);
    }
    let report = CutoffReport {
        unit: s,
        center,
        max_slope,
        slope_bound: 1.0 / params.scale(),
        min_gap,
        gap_bound: params.scale(),
        residuals,
        length_ratio,
    };
    Ok(CutoffSet { grid: grid.clone(), params, center, masks, report })
}

impl CutoffSet {
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn params(&self) -> &CutoffParams {
        &self.params
    }

    pub fn report(&self) -> &CutoffReport {
        &self.report
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// The period `[c - L, c)` that carries the cutoffs on the line.
    pub fn window(&self) -> (f64, f64) {
        (self.center - self.grid.length(), self.center)
    }

    /// Node values of level `j` on the torus.
    pub fn mask(&self, j: usize) -> &[f64] {
        &self.masks[j]
    }

    /// Level `j` at a torus point.
    pub fn profile(&self, j: usize, x: f64) -> f64 {
        let l = self.grid.length();
        level_value((x - (self.center - l)).rem_euclid(l), l, self.report.unit, j)
    }

    /// Level `j` on a line grid: the window copy, zero elsewhere.
    pub fn line_mask(&self, j: usize, line: &TorusGrid) -> Vec<f64> {
        let l = self.grid.length();
        let (a, b) = self.window();
        line.nodes()
            .into_iter()
            .map(|y| if y >= a && y < b { level_value(y - a, l, self.report.unit, j) } else { 0.0 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles;
    use crate::spectral_core::make_grid;

    fn params(k: f64, eta: f64) -> CutoffParams {
        CutoffParams { d: 2.0, k, t: 0.25, eta, eps: 1e-6 }
    }

    #[test]
    fn compact_data_has_zero_residual() {
        let g = make_grid(256.0, 2048).unwrap();
        let u = SpectralField::from_fn(&g, |x| {
            let r = 1.0 - (x / 4.0).powi(2);
            num_complex::Complex64::new(if r > 0.0 { r * r } else { 0.0 }, 0.0)
        });
        let c = build_cutoffs(params(1.0, 0.5), &u).unwrap();
        for r in c.report().residuals {
            assert!(r < 1e-14, "{r}");
        }
    }

    #[test]
    fn slope_and_gap_bounds_hold() {
        let g = make_grid(512.0, 4096).unwrap();
        let u = profiles::gaussian(&g, 1.0, 30.0, 2.0, 0.0);
        for (k, eta) in [(0.5, 0.4), (1.0, 0.2), (2.0, 0.25)] {
            let c = build_cutoffs(params(k, eta), &u).unwrap();
            let r = c.report();
            assert!(r.max_slope <= r.slope_bound, "{} > {}", r.max_slope, r.slope_bound);
            assert!(r.min_gap >= r.gap_bound, "{} < {}", r.min_gap, r.gap_bound);
            for j in 0..CUTOFF_LEVELS {
                assert!(c.mask(j).iter().all(|v| (0.0..=1.0).contains(v)));
                for i in 0..j {
                    for (a, b) in c.mask(i).iter().zip(c.mask(j)) {
                        assert!(*a == 0.0 || *b == 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn short_period_is_rejected() {
        let g = make_grid(16.0, 128).unwrap();
        let u = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.0);
        assert!(matches!(build_cutoffs(params(1.0, 0.5), &u), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn heavy_background_has_no_window() {
        let g = make_grid(256.0, 1024).unwrap();
        let u = SpectralField::from_fn(&g, |_| num_complex::Complex64::new(0.1, 0.0));
        assert!(matches!(build_cutoffs(params(0.5, 0.5), &u), Err(Error::NoLowMassWindow { .. })));
    }

    #[test]
    fn line_mask_copies_one_period() {
        let g = make_grid(128.0, 512).unwrap();
        let line = make_grid(256.0, 1024).unwrap();
        let u = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.0);
        let c = build_cutoffs(params(0.5, 0.5), &u).unwrap();
        let lm = c.line_mask(2, &line);
        let (a, b) = c.window();
        for (y, v) in line.nodes().iter().zip(&lm) {
            if *y < a || *y >= b {
                assert_eq!(*v, 0.0);
            } else {
                assert!((v - c.profile(2, *y)).abs() < 1e-15);
            }
        }
    }
}

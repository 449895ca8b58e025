use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral_core::{SpectralField, TorusGrid};

/// Relative change allowed between the working and refined resolution.
pub const FIREWALL_REL_TOL: f64 = 0.10;
/// Differences below this are treated as agreement regardless of scale.
pub const FIREWALL_ABS_TOL: f64 = 1e-9;

/// One named pass/fail statement with the numbers behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// One sweep value and everything measured at it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub key: String,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Rows in sweep order plus the verdicts drawn from them.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub kind: String,
    pub sweep_key: String,
    pub columns: Vec<String>,
    pub error_columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub verdicts: Vec<Verdict>,
    /// Resolutions and other run parameters, recorded for provenance.
    pub provenance: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn new(kind: &str, sweep_key: &str, columns: &[&str], error_columns: &[&str]) -> Self {
        Self {
            kind: kind.to_string(),
            sweep_key: sweep_key.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            error_columns: error_columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn push_row(&mut self, key: impl Into<String>, values: Vec<f64>, errors: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        debug_assert_eq!(errors.len(), self.error_columns.len());
        self.rows.push(ReportRow { key: key.into(), values, errors });
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.provenance.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn find_verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// `"no-data"` without rows, else `"pass"` iff every verdict passed.
    pub fn overall(&self) -> &'static str {
        if self.rows.is_empty() {
            "no-data"
        } else if self.verdicts.iter().all(|v| v.passed) {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn passed(&self) -> bool {
        self.overall() != "fail"
    }
}

/// Working resolution and the refined one used by the firewall.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolution {
    pub dt_divisor: usize,
    pub node_factor: usize,
}

impl Resolution {
    pub const BASE: Self = Self { dt_divisor: 1, node_factor: 1 };
    pub const REFINED: Self = Self { dt_divisor: 2, node_factor: 2 };

    pub fn grid(&self, g: &TorusGrid) -> Result<TorusGrid> {
        if self.node_factor == 1 {
            return Ok(g.clone());
        }
        TorusGrid::new(g.length(), g.points() * self.node_factor)
    }

    pub fn dt(&self, dt: f64) -> f64 {
        dt / self.dt_divisor as f64
    }
}

/// Moves a field to a grid of the same length by copying shared Fourier
/// modes; exact for fields band-limited to the coarser grid.
pub fn resample(field: &SpectralField, grid: &TorusGrid) -> Result<SpectralField> {
    let src = field.grid();
    if (src.length() - grid.length()).abs() > 1e-12 * src.length() {
        return Err(Error::IncompatibleGrids(format!(
            "cannot resample from length {} to {}",
            src.length(),
            grid.length()
        )));
    }
    if src == grid {
        return Ok(field.clone());
    }
    let kmax = (src.points().min(grid.points()) / 2) as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.points()];
    for k in -kmax..kmax {
        // The shared Nyquist mode is ambiguous; keep it only when grids match.
        if k == -kmax && src.points() != grid.points() {
            continue;
        }
        if let (Some(i), Some(j)) = (src.index_of(k), grid.index_of(k)) {
            out[j] = field.coefficients()[i];
        }
    }
    SpectralField::from_coefficients(grid, out)
}

/// Runs `row(i, res)` for every sweep index concurrently; output keeps sweep order.
pub(crate) fn run_rows<T: Send>(
    count: usize,
    res: Resolution,
    row: impl Fn(usize, Resolution) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..count).into_par_iter().map(|i| row(i, res)).collect()
}

/// The discretization firewall: reruns the first and last sweep rows at
/// `(dt/2, 2x nodes)` and compares the selected columns.
pub(crate) fn firewall(
    report: &mut ExperimentReport,
    watched: &[usize],
    count: usize,
    row: impl Fn(usize, Resolution) -> Result<Vec<f64>> + Sync,
    base: &[Vec<f64>],
) -> Result<bool> {
    if count == 0 {
        return Ok(true);
    }
    let mut idx = vec![0];
    if count > 1 {
        idx.push(count - 1);
    }
    let refined: Vec<Vec<f64>> = idx.par_iter().map(|&i| row(i, Resolution::REFINED)).collect::<Result<_>>()?;
    let mut ok = true;
    let mut changes = Vec::new();
    for (i, r) in idx.iter().zip(&refined) {
        let mut worst: f64 = 0.0;
        for &c in watched {
            let (a, b) = (base[*i][c], r[c]);
            if !a.is_finite() && !b.is_finite() {
                continue;
            }
            let diff = (a - b).abs();
            let rel = diff / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            ok &= diff <= FIREWALL_ABS_TOL || rel <= FIREWALL_REL_TOL;
        }
        changes.push(format!("row {i}: {worst:.3e}"));
    }
    report.verdict(Verdict::new(
        "discretization_firewall",
        ok,
        format!("relative change at (dt/2, 2x nodes): {}", changes.join(", ")),
    ));
    Ok(ok)
}

/// True when every consecutive pair decreases strictly.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

use num_complex::Complex64;

use super::report::{firewall, run_rows, strictly_decreasing, ExperimentReport, Resolution, Verdict};
use crate::error::{invalid, Result};
use crate::estimates::strichartz_s;
use crate::profiles;
use crate::propagators::{evolve, ModelSpec, SchemeKind, StepScheme, Trajectory};
use crate::spectral_core::{apply_multiplier, MultiplierSymbol, SpectralField, TorusGrid};
use crate::symmetries::{build_cutoffs, pull_back, push_forward, CutoffParams, CutoffSet};

/// Inputs for the line-versus-torus sweep. Row `i` uses `(K_i, eps_i)` with
/// `eta = eps_i`; the torus has period `length` and the line twice that.
#[derive(Clone, Debug)]
pub struct TorusApproxSpec {
    /// Mass of the Gaussian core of the initial data.
    pub core_mass: f64,
    pub d: u64,
    pub k_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub samples: usize,
    pub length: f64,
    pub points: usize,
    /// Adds a constant background carrying half of each row's mass budget
    /// outside the innermost cutoff.
    pub background: bool,
}

impl TorusApproxSpec {
    pub fn validate(&self) -> Result<()> {
        super::check_sweep("K_list", &self.k_list)?;
        if self.eps_list.len() != self.k_list.len() {
            return Err(invalid("eps_list", "must have one entry per K"));
        }
        let mut rev = self.eps_list.clone();
        rev.reverse();
        super::check_sweep("eps_list (read backwards)", &rev)?;
        if self.d < 1 || !(self.core_mass >= 0.0) {
            return Err(invalid("D", "need D >= 1 and a non-negative core mass"));
        }
        for k in &self.k_list {
            let cut = 2.0 * self.d as f64 * k;
            if (cut - cut.round()).abs() > 1e-12 || cut < 1.0 {
                return Err(invalid("K_list", format!("2 D K must be a positive integer, got {cut}")));
            }
        }
        if !(self.t_final > 0.0) || !(self.dt > 0.0) || self.samples < 2 {
            return Err(invalid("time", "need T > 0, dt > 0 and at least two samples"));
        }
        TorusGrid::new(self.length, self.points)?;
        Ok(())
    }

    fn n_cut(&self, i: usize) -> u64 {
        (2.0 * self.d as f64 * self.k_list[i]).round() as u64
    }

    fn params(&self, i: usize) -> CutoffParams {
        let eps = self.eps_list[i];
        CutoffParams { d: self.d as f64, k: self.k_list[i], t: self.t_final, eta: eps, eps }
    }
}

/// Row data and cutoffs on one torus grid.
struct RowSetup {
    u0: SpectralField,
    cutoffs: CutoffSet,
    line: TorusGrid,
    scheme: StepScheme,
    stride: usize,
}

fn setup(spec: &TorusApproxSpec, i: usize, res: Resolution) -> Result<RowSetup> {
    let base = TorusGrid::new(spec.length, spec.points)?;
    let torus = res.grid(&base)?;
    let amp = (spec.core_mass / (2.0 * std::f64::consts::PI.sqrt())).sqrt();
    let core = profiles::gaussian(&torus, amp, 0.0, 2.0, 0.0);
    let params = spec.params(i);
    let mut u0 = core.clone();
    if spec.background {
        // The outer mass of a unit constant depends only on L and the unit,
        // so any placement of the cutoffs gives the same normalisation.
        let probe = build_cutoffs(CutoffParams { eps: f64::MAX, ..params }, &core)?;
        let dx = torus.dx();
        let outer = (dx * probe.mask(0).iter().map(|m| (1.0 - m).powi(2)).sum::<f64>()).sqrt();
        let b = 0.5 * params.eps / outer;
        u0 = u0.map_coefficients(|xi, c| if xi == 0.0 { c + Complex64::new(b, 0.0) } else { c });
    }
    let u0 = apply_multiplier(&u0, &MultiplierSymbol::SharpLow(spec.n_cut(i) as f64));
    let cutoffs = build_cutoffs(params, &u0)?;
    let line = TorusGrid::new(2.0 * torus.length(), 2 * torus.points())?;
    let dt = res.dt(spec.dt);
    let steps = (spec.t_final / dt).round().max(1.0) as usize;
    let stride = (steps / spec.samples).max(1);
    let scheme = StepScheme::new(SchemeKind::LawsonRk4, dt)?;
    Ok(RowSetup { u0, cutoffs, line, scheme, stride })
}

/// The line-truncated flow from `chi^0 u0`.
fn line_flow(spec: &TorusApproxSpec, i: usize, s: &RowSetup) -> Result<Trajectory> {
    let lifted = pull_back(&s.u0, s.cutoffs.window(), &s.line)?.masked(&s.cutoffs.line_mask(0, &s.line))?;
    let model = ModelSpec::RescaledTruncated { d: spec.d, k: spec.k_list[i] };
    evolve(&model, &lifted, spec.t_final, &s.scheme, s.stride)
}

/// `sup_t ||(1 - chi^1) u(t)||_{L^2}` along a line trajectory.
fn outer_mass(s: &RowSetup, traj: &Trajectory) -> Result<f64> {
    let chi1 = s.cutoffs.line_mask(1, &s.line);
    let outside: Vec<f64> = chi1.iter().map(|c| 1.0 - c).collect();
    let mut worst: f64 = 0.0;
    for u in traj.snapshots() {
        worst = worst.max(u.masked(&outside)?.norm());
    }
    Ok(worst)
}

const COLUMNS: [&str; 8] =
    ["K", "eps", "unit", "discrepancy", "sup_l2", "l5_l10", "outer_mass_chi1", "initial_residual_chi0"];

/// Compares `P_{<=2DK}(chi^2 u_line)` pushed onto the torus against the
/// torus-truncated solution in the sampled S-norm, for each `(K, eps)`.
pub fn run_torus_approx(spec: &TorusApproxSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let mut report = ExperimentReport::new("torus_approx", "K,eps", &COLUMNS, &["s_quadrature_error"]);
    report.note("torus_length", spec.length);
    report.note("torus_points", spec.points);
    report.note("line_length", 2.0 * spec.length);
    report.note("D", spec.d);
    report.note("dt", spec.dt);
    report.note("eta", "equal to eps in every row");

    let row = |i: usize, res: Resolution| -> Result<Vec<f64>> {
        let s = setup(spec, i, res)?;
        let torus = s.u0.grid().clone();
        let n_cut = spec.n_cut(i);
        let model = ModelSpec::TorusTruncated { n_cut, d: spec.d, k: spec.k_list[i] };
        let on_torus = evolve(&model, &s.u0, spec.t_final, &s.scheme, s.stride)?;
        let on_line = line_flow(spec, i, &s)?;
        let chi2 = s.cutoffs.line_mask(2, &s.line);
        let low = MultiplierSymbol::SharpLow(n_cut as f64);
        let mapped: Vec<SpectralField> = on_line
            .snapshots()
            .iter()
            .map(|u| Ok(apply_multiplier(&push_forward(&u.masked(&chi2)?, &torus)?, &low)))
            .collect::<Result<_>>()?;
        let mapped = Trajectory::new(&torus, on_line.times().to_vec(), mapped, None)?;
        let s_norm = strichartz_s(&mapped.difference(&on_torus)?)?;
        Ok(vec![
            spec.k_list[i],
            spec.eps_list[i],
            s.cutoffs.report().unit,
            s_norm.value,
            s_norm.param("sup_l2").unwrap_or(f64::NAN),
            s_norm.param("l5_l10").unwrap_or(f64::NAN),
            outer_mass(&s, &on_line)?,
            s.cutoffs.report().residuals[0],
            s_norm.quadrature_error_estimate,
        ])
    };
    let rows = run_rows(spec.k_list.len(), Resolution::BASE, row)?;
    for (i, r) in rows.iter().enumerate() {
        report.push_row(format!("{};{}", spec.k_list[i], spec.eps_list[i]), r[..8].to_vec(), r[8..].to_vec());
    }
    firewall(&mut report, &[3], rows.len(), row, &rows)?;

    let disc = report.column("discrepancy").expect("column exists");
    if disc.len() >= 2 {
        report.verdict(Verdict::new(
            "discrepancy_decreasing",
            strictly_decreasing(&disc),
            format!("discrepancy column {disc:?}"),
        ));
        let (first, last) = (disc[0], disc[disc.len() - 1]);
        report.verdict(Verdict::new(
            "final_below_half_of_first",
            last < 0.5 * first,
            format!("first {first:.4e}, final {last:.4e}"),
        ));
    }
    concentration_verdict(&mut report);
    Ok(report)
}

fn concentration_verdict(report: &mut ExperimentReport) {
    let outer = report.column("outer_mass_chi1").expect("column exists");
    let eps = report.column("eps").expect("column exists");
    let bad: Vec<usize> = (0..outer.len()).filter(|i| !(outer[*i] < eps[*i])).collect();
    report.verdict(Verdict::new(
        "mass_concentration_below_eps",
        bad.is_empty(),
        format!("sup_t ||(1 - chi^1) u|| per row {outer:?}; rows over budget {bad:?}"),
    ));
}

/// Only the line flow: tracks how much mass leaves the first cutoff.
pub fn run_mass_concentration(spec: &TorusApproxSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let cols = ["K", "eps", "unit", "outer_mass_chi1", "initial_residual_chi0"];
    let mut report = ExperimentReport::new("mass_concentration", "K,eps", &cols, &[]);
    report.note("torus_length", spec.length);
    report.note("torus_points", spec.points);
    report.note("dt", spec.dt);
    let row = |i: usize, res: Resolution| -> Result<Vec<f64>> {
        let s = setup(spec, i, res)?;
        let traj = line_flow(spec, i, &s)?;
        Ok(vec![
            spec.k_list[i],
            spec.eps_list[i],
            s.cutoffs.report().unit,
            outer_mass(&s, &traj)?,
            s.cutoffs.report().residuals[0],
        ])
    };
    let rows = run_rows(spec.k_list.len(), Resolution::BASE, row)?;
    for (i, r) in rows.iter().enumerate() {
        report.push_row(format!("{};{}", spec.k_list[i], spec.eps_list[i]), r.clone(), vec![]);
    }
    firewall(&mut report, &[3], rows.len(), row, &rows)?;
    concentration_verdict(&mut report);
    Ok(report)
}

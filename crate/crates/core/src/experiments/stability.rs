use num_complex::Complex64;

use super::report::{firewall, loglog_slope, resample, run_rows, ExperimentReport, Resolution, Verdict};
use crate::error::{invalid, Error, Result};
use crate::estimates::spacetime_norm;
use crate::propagators::{evolve, evolve_forced, ModelSpec, SchemeKind, StepScheme};
use crate::spectral_core::SpectralField;

/// Linear-response sweep: for each `eps`, the approximate solution solves the
/// equation with error `eps * forcing` from `u0`, and the exact solution starts
/// from `u0 + eps * data_perturbation`.
#[derive(Clone, Debug)]
pub struct StabilitySpec {
    pub model: ModelSpec,
    pub u0: SpectralField,
    pub forcing: SpectralField,
    pub data_perturbation: SpectralField,
    pub eps_list: Vec<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub samples: usize,
}

impl StabilitySpec {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.u0.check_grid(&self.forcing)?;
        self.u0.check_grid(&self.data_perturbation)?;
        super::check_sweep("eps_list", &self.eps_list)?;
        if self.eps_list[0] < 0.0 {
            return Err(invalid("eps_list", "entries must be non-negative"));
        }
        if !(self.t_final > 0.0) || !(self.dt > 0.0) || self.samples < 2 {
            return Err(invalid("time", "need T > 0, dt > 0 and at least two samples"));
        }
        Ok(())
    }
}

/// Allowed distance of the fitted log-log slope from 1.
pub const SLOPE_TOLERANCE: f64 = 0.2;

const COLUMNS: [&str; 4] = ["eps", "l6_difference", "difference_over_eps", "diverged"];

pub fn run_stability_check(spec: &StabilitySpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let grid = spec.u0.grid().clone();
    let row = |i: usize, res: Resolution| -> Result<Vec<f64>> {
        let eps = spec.eps_list[i];
        let g = res.grid(&grid)?;
        let u0 = resample(&spec.u0, &g)?;
        let dt = res.dt(spec.dt);
        let steps = (spec.t_final / dt).round().max(1.0) as usize;
        let stride = (steps / spec.samples).max(1);
        let e = Complex64::new(eps, 0.0);
        let forcing = resample(&spec.forcing, &g)?.scaled(e);
        let perturbed = u0.axpy(e, &resample(&spec.data_perturbation, &g)?)?;
        let scheme = StepScheme::new(SchemeKind::LawsonRk4, dt)?;
        let runs = evolve_forced(&spec.model, &u0, &forcing, spec.t_final, dt, stride)
            .and_then(|a| Ok((a, evolve(&spec.model, &perturbed, spec.t_final, &scheme, stride)?)));
        match runs {
            Ok((approx, exact)) => {
                let d = spacetime_norm(&exact.difference(&approx)?, 6.0, 6.0)?.value;
                let ratio = if eps > 0.0 { d / eps } else { f64::NAN };
                Ok(vec![eps, d, ratio, 0.0])
            }
            Err(Error::NonFinite { .. }) => Ok(vec![eps, f64::NAN, f64::NAN, 1.0]),
            Err(e) => Err(e),
        }
    };
    let rows = run_rows(spec.eps_list.len(), Resolution::BASE, row)?;

    let mut report = ExperimentReport::new("stability", "eps", &COLUMNS, &[]);
    report.note("grid_length", grid.length());
    report.note("grid_points", grid.points());
    report.note("model", spec.model.name());
    report.note("T", spec.t_final);
    report.note("dt", spec.dt);
    for (e, r) in spec.eps_list.iter().zip(&rows) {
        report.push_row(e.to_string(), r.clone(), vec![]);
    }
    firewall(&mut report, &[1], rows.len(), row, &rows)?;

    let usable: Vec<&Vec<f64>> = rows.iter().filter(|r| r[3] == 0.0 && r[0] > 0.0).collect();
    let eps: Vec<f64> = usable.iter().map(|r| r[0]).collect();
    let diff: Vec<f64> = usable.iter().map(|r| r[1]).collect();
    if let Some(slope) = loglog_slope(&eps, &diff) {
        report.note("loglog_slope", slope);
        report.verdict(Verdict::new(
            "linear_response",
            (slope - 1.0).abs() <= SLOPE_TOLERANCE,
            format!("log-log slope {slope:.4} over {} rows (tolerance 1 +- {SLOPE_TOLERANCE})", eps.len()),
        ));
    } else if rows.iter().all(|r| r[0] == 0.0) {
        let d = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
        report.verdict(Verdict::new("zero_eps_identical", d < 1e-8, format!("difference {d:.3e} at eps = 0")));
    } else {
        report.verdict(Verdict::new("linear_response", false, "fewer than two usable rows for a slope"));
    }
    Ok(report)
}

use super::report::{firewall, resample, run_rows, strictly_decreasing, ExperimentReport, Resolution, Verdict};
use crate::error::{invalid, Error, Result};
use crate::estimates::{homogenization_defect, spacetime_norm};
use crate::propagators::{evolve, HSpec, ModelSpec, SchemeKind, StepScheme};
use crate::spectral_core::SpectralField;

/// Inputs for the oscillating-coefficient sweep.
#[derive(Clone, Debug)]
pub struct HomogenizationSpec {
    pub h: HSpec,
    pub lambda: f64,
    pub n_list: Vec<u32>,
    pub u0: SpectralField,
    pub t_final: f64,
    pub dt: f64,
    /// Time samples kept for the space-time norms.
    pub samples: usize,
    /// Radius of the region where the hypothesis defect is measured.
    pub radius: f64,
}

impl HomogenizationSpec {
    pub fn validate(&self) -> Result<()> {
        self.h.validate()?;
        super::check_sweep("n_list", &self.n_list.iter().map(|n| *n as f64).collect::<Vec<_>>())?;
        if self.n_list[0] == 0 {
            return Err(invalid("n_list", "entries must be >= 1"));
        }
        if !(self.t_final > 0.0) || !(self.dt > 0.0) || self.samples < 2 {
            return Err(invalid("time", "need T > 0, dt > 0 and at least two samples"));
        }
        if !(self.radius > 0.0) {
            return Err(invalid("radius", "must be positive"));
        }
        Ok(())
    }
}

const COLUMNS: [&str; 4] = ["hypothesis_defect", "l6_difference", "linf_l2_difference", "mass_drift"];

/// Solves the equation with `lambda h(n x)` and with the averaged constant
/// `lambda mean(h)`; reports their distance for each `n`.
pub fn run_homogenization(spec: &HomogenizationSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let grid = spec.u0.grid().clone();
    let mut report = ExperimentReport::new("homogenization", "n", &COLUMNS, &["l6_quadrature_error"]);
    report.note("grid_length", grid.length());
    report.note("grid_points", grid.points());
    report.note("dt", spec.dt);
    report.note("T", spec.t_final);

    let hyp: Vec<f64> = spec
        .n_list
        .iter()
        .map(|n| homogenization_defect(&spec.h, *n, spec.radius, &grid).map(|r| r.value))
        .collect::<Result<_>>()?;
    if !spec.h.is_constant() && !strictly_decreasing(&hyp) {
        return Err(Error::Hypothesis(format!(
            "homogenization defect is not decreasing in n: {hyp:?}; h does not homogenize on this grid"
        )));
    }

    let averaged = ModelSpec::Quintic { lambda: spec.lambda * spec.h.mean() };
    let row = |i: usize, res: Resolution| -> Result<Vec<f64>> {
        let g = res.grid(&grid)?;
        let u0 = resample(&spec.u0, &g)?;
        let dt = res.dt(spec.dt);
        let steps = (spec.t_final / dt).round().max(1.0) as usize;
        let stride = (steps / spec.samples).max(1);
        let scheme = StepScheme::new(SchemeKind::StrangExact, dt)?;
        let model = ModelSpec::Inhomogeneous { h: spec.h.clone(), n: spec.n_list[i], lambda: spec.lambda };
        let a = evolve(&model, &u0, spec.t_final, &scheme, stride)?;
        let b = evolve(&averaged, &u0, spec.t_final, &scheme, stride)?;
        let d = a.difference(&b)?;
        let l6 = spacetime_norm(&d, 6.0, 6.0)?;
        let sup = spacetime_norm(&d, f64::INFINITY, 2.0)?;
        Ok(vec![hyp[i], l6.value, sup.value, a.mass_drift(), l6.quadrature_error_estimate])
    };
    let rows = run_rows(spec.n_list.len(), Resolution::BASE, row)?;
    for (n, r) in spec.n_list.iter().zip(&rows) {
        report.push_row(n.to_string(), r[..4].to_vec(), r[4..].to_vec());
    }
    firewall(&mut report, &[1], rows.len(), row, &rows)?;

    let l6 = report.column("l6_difference").expect("column exists");
    if spec.h.is_constant() || spec.u0.norm() == 0.0 {
        // Both equations coincide (or the data is trivial): nothing should move apart.
        let worst = l6.iter().copied().fold(0.0, f64::max);
        report.verdict(Verdict::new(
            "identical_equations",
            worst < 1e-8,
            format!("max L6 difference {worst:.3e}"),
        ));
    } else {
        let (first, last) = (l6[0], l6[l6.len() - 1]);
        report.verdict(Verdict::new(
            "final_below_quarter_of_first",
            last < 0.25 * first,
            format!("first {first:.4e}, final {last:.4e}"),
        ));
        let worst = l6.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        report.verdict(Verdict::new(
            "no_increase_beyond_10_percent",
            worst <= 1.10,
            format!("largest consecutive ratio {worst:.4}"),
        ));
    }
    Ok(report)
}

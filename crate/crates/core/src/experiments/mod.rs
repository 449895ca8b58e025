//! Sweeps that turn the asymptotic statements into finite trend checks.
//!
//! Every experiment reruns its first and last rows at half the step and twice
//! the nodes before its verdicts are trusted (the `discretization_firewall`
//! verdict). Rows run concurrently but are reported in sweep order.

mod homogenization;
mod nonsqueeze;
mod report;
mod stability;
mod torus_approx;
mod weak;

pub use homogenization::{run_homogenization, HomogenizationSpec};
pub use nonsqueeze::{run_nonsqueezing_probe, NonsqueezeSpec};
pub use report::{
    loglog_slope, resample, strictly_decreasing, ExperimentReport, ReportRow, Resolution, Verdict,
    FIREWALL_ABS_TOL, FIREWALL_REL_TOL,
};
pub use stability::{run_stability_check, StabilitySpec, SLOPE_TOLERANCE};
pub use torus_approx::{run_mass_concentration, run_torus_approx, TorusApproxSpec};
pub use weak::{run_weak_convergence, WeakSpec};

use crate::error::{invalid, Result};

/// One experiment with its inputs.
#[derive(Clone, Debug)]
pub enum ExperimentSpec {
    Homogenization(HomogenizationSpec),
    TorusApprox(TorusApproxSpec),
    WeakConvergence(WeakSpec),
    Nonsqueezing(NonsqueezeSpec),
    Stability(StabilitySpec),
    MassConcentration(TorusApproxSpec),
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Homogenization(_) => "homogenization",
            Self::TorusApprox(_) => "torus_approx",
            Self::WeakConvergence(_) => "weak_convergence",
            Self::Nonsqueezing(_) => "nonsqueezing",
            Self::Stability(_) => "stability",
            Self::MassConcentration(_) => "mass_concentration",
        }
    }

    pub fn run(&self) -> Result<ExperimentReport> {
        match self {
            Self::Homogenization(s) => run_homogenization(s),
            Self::TorusApprox(s) => run_torus_approx(s),
            Self::WeakConvergence(s) => run_weak_convergence(s),
            Self::Nonsqueezing(s) => run_nonsqueezing_probe(s),
            Self::Stability(s) => run_stability_check(s),
            Self::MassConcentration(s) => run_mass_concentration(s),
        }
    }
}

/// Sweep lists must be non-empty, finite and strictly increasing.
pub fn check_sweep(name: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(name, "sweep list is empty"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(name, "sweep list has a non-finite entry"));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid(name, format!("sweep list must be strictly increasing, got {v:?}")));
    }
    Ok(())
}

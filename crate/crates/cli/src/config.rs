//! The JSON run configuration and its translation into core inputs.
//!
//! Parsing rejects unknown keys; `resolve` applies defaults and validates
//! every parameter before anything is computed.

use std::path::{Path, PathBuf};

use nlslab_core::experiments::{
    ExperimentSpec, HomogenizationSpec, NonsqueezeSpec, StabilitySpec, TorusApproxSpec, WeakSpec,
};
use nlslab_core::profiles;
use nlslab_core::propagators::{HSpec, ModelSpec, SchemeKind, StepScheme, DEFAULT_DT_EXPONENT};
use nlslab_core::spectral_core::{MultiplierSymbol, SpectralField, TorusGrid};
use nlslab_core::Complex64;
use serde::Deserialize;

use crate::error::CliError;
use crate::trajfile::load_trajectory;

pub const CONFIG_VERSION: u32 = 1;
/// Default number of stored samples along a run.
pub const DEFAULT_SAMPLES: usize = 64;

fn one() -> f64 {
    1.0
}

fn version_one() -> u32 {
    CONFIG_VERSION
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "version_one")]
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub model: Option<ModelConfig>,
    pub grid: Option<GridConfig>,
    pub time: Option<TimeConfig>,
    pub init: Option<FieldConfig>,
    pub experiment: Option<ExperimentConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Free,
    Quintic {
        #[serde(default = "one")]
        lambda: f64,
    },
    AlphaTruncated {
        alpha: f64,
        #[serde(default)]
        symbol: SymbolConfig,
    },
    DTruncated {
        #[serde(rename = "D")]
        d: u64,
    },
    RescaledTruncated {
        #[serde(rename = "D")]
        d: u64,
        #[serde(rename = "K")]
        k: f64,
    },
    TorusTruncated {
        n_cut: u64,
        #[serde(rename = "D")]
        d: u64,
        #[serde(rename = "K")]
        k: f64,
    },
    Inhomogeneous {
        h: HConfig,
        n: u32,
        #[serde(default = "one")]
        lambda: f64,
    },
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolConfig {
    #[default]
    Identity,
    SharpLow {
        #[serde(rename = "N")]
        n: f64,
    },
    SmoothLow {
        #[serde(rename = "N")]
        n: f64,
    },
    Dyadic {
        #[serde(rename = "N")]
        n: f64,
    },
    Md {
        #[serde(rename = "D")]
        d: u64,
    },
    MdRescaled {
        #[serde(rename = "D")]
        d: u64,
        #[serde(rename = "K")]
        k: f64,
    },
    HelmholtzInverse,
}

/// `"one_plus_cos"`, a constant, or one period of samples on `[0, 1)`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum HConfig {
    Named(String),
    Constant(f64),
    Samples(Vec<f64>),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    /// Defaults to `T * 2^-14`.
    pub dt: Option<f64>,
    /// Defaults to one stored sample per `steps / 64` steps.
    pub sample_stride: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Zero,
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        boost: f64,
    },
    Sech {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    Lorentzian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    PlaneWave {
        #[serde(default = "one")]
        amplitude: f64,
        k: i64,
    },
    /// A snapshot of an NLST file (the last one unless `snapshot` is given);
    /// relative paths are taken from the config file's directory.
    File { path: String, snapshot: Option<usize> },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Kernel {
        #[serde(rename = "L_list")]
        l_list: Vec<f64>,
        #[serde(rename = "N")]
        n: f64,
        #[serde(rename = "T")]
        t_final: f64,
        /// Defaults to `0.05 T`.
        t_min: Option<f64>,
        #[serde(default)]
        x_samples: usize,
        #[serde(default = "default_samples")]
        t_samples: usize,
        /// Largest relative change allowed between consecutive lengths.
        #[serde(default = "default_kernel_tolerance")]
        tolerance: f64,
    },
    Homogenization {
        h: HConfig,
        #[serde(default = "one")]
        lambda: f64,
        n_list: Vec<u32>,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    TorusApprox(TorusApproxConfig),
    MassConcentration(TorusApproxConfig),
    WeakConvergence {
        core: FieldConfig,
        bump: FieldConfig,
        x_shift_list: Vec<f64>,
        #[serde(rename = "M_list")]
        m_list: Vec<f64>,
        #[serde(rename = "D")]
        d: u64,
        functionals: Vec<FieldConfig>,
        t_list: Vec<f64>,
    },
    Nonsqueezing {
        z_star: FieldConfig,
        ell: FieldConfig,
        #[serde(default)]
        alpha: [f64; 2],
        r: f64,
        #[serde(default = "default_samples")]
        sample_count: usize,
    },
    Stability {
        forcing: FieldConfig,
        data_perturbation: FieldConfig,
        eps_list: Vec<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

fn default_kernel_tolerance() -> f64 {
    0.10
}

fn default_radius() -> f64 {
    4.0
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TorusApproxConfig {
    pub core_mass: f64,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "K_list")]
    pub k_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub length: f64,
    pub points: usize,
    #[serde(default = "default_true")]
    pub background: bool,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_json")]
    pub json: String,
    #[serde(default = "default_traj")]
    pub trajectory: String,
}

fn default_csv() -> String {
    "report.csv".into()
}

fn default_json() -> String {
    "report.json".into()
}

fn default_traj() -> String {
    "trajectory.nlst".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: default_csv(), json: default_json(), trajectory: default_traj() }
    }
}

/// Parses a JSON document; syntax errors carry their position.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => CliError::Syntax { line, column, message },
            Category::Data => CliError::Schema { line, column, message },
        }
    })?;
    if cfg.version != CONFIG_VERSION {
        return Err(CliError::invalid("version", format!("unsupported config version {}", cfg.version)));
    }
    Ok(cfg)
}

/// Subcommands that run something from a config.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Simulate,
    Kernel,
    Homogenize,
    TorusApprox,
    WeakLimit,
    Nonsqueeze,
    Stability,
}

impl Task {
    fn accepts(self, e: &ExperimentConfig) -> bool {
        matches!(
            (self, e),
            (Task::Kernel, ExperimentConfig::Kernel { .. })
                | (Task::Homogenize, ExperimentConfig::Homogenization { .. })
                | (Task::TorusApprox, ExperimentConfig::TorusApprox(_) | ExperimentConfig::MassConcentration(_))
                | (Task::WeakLimit, ExperimentConfig::WeakConvergence { .. })
                | (Task::Nonsqueeze, ExperimentConfig::Nonsqueezing { .. })
                | (Task::Stability, ExperimentConfig::Stability { .. })
        )
    }
}

/// A fully validated simulation.
#[derive(Clone, Debug)]
pub struct SimulatePlan {
    pub model: ModelSpec,
    pub u0: SpectralField,
    pub t_final: f64,
    pub scheme: StepScheme,
    pub sample_stride: usize,
}

#[derive(Clone, Debug)]
pub struct KernelPlan {
    pub l_list: Vec<f64>,
    pub n: f64,
    pub t_final: f64,
    pub t_min: f64,
    pub x_samples: usize,
    pub t_samples: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub enum Plan {
    Simulate(SimulatePlan),
    Kernel(KernelPlan),
    Experiment(ExperimentSpec),
}

fn need<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::invalid(field, "required block is missing"))
}

fn core(field: &str) -> impl Fn(nlslab_core::Error) -> CliError + '_ {
    move |e| match e {
        nlslab_core::Error::InvalidParameter { name, reason } => {
            CliError::invalid(&format!("{field}.{name}"), reason)
        }
        other => CliError::invalid(field, other.to_string()),
    }
}

fn finite_positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn grid(cfg: &GridConfig, field: &str) -> Result<TorusGrid, CliError> {
    if cfg.points < 8 || !cfg.points.is_power_of_two() {
        return Err(CliError::invalid(
            &format!("{field}.points"),
            format!("must be a power of two and at least 8, got {}", cfg.points),
        ));
    }
    finite_positive(&format!("{field}.length"), cfg.length)?;
    TorusGrid::new(cfg.length, cfg.points).map_err(core(field))
}

fn h_spec(h: &HConfig, field: &str) -> Result<HSpec, CliError> {
    let spec = match h {
        HConfig::Named(s) if s == "one_plus_cos" => HSpec::OnePlusCos,
        HConfig::Named(s) => {
            return Err(CliError::invalid(field, format!("unknown coefficient `{s}` (expected \"one_plus_cos\")")))
        }
        HConfig::Constant(c) => HSpec::Constant(*c),
        HConfig::Samples(s) => HSpec::Samples(s.clone()),
    };
    spec.validate().map_err(core(field))?;
    Ok(spec)
}

fn symbol(s: &SymbolConfig) -> MultiplierSymbol {
    match s {
        SymbolConfig::Identity => MultiplierSymbol::Identity,
        SymbolConfig::SharpLow { n } => MultiplierSymbol::SharpLow(*n),
        SymbolConfig::SmoothLow { n } => MultiplierSymbol::SmoothLow(*n),
        SymbolConfig::Dyadic { n } => MultiplierSymbol::Dyadic(*n),
        SymbolConfig::Md { d } => MultiplierSymbol::Md(*d),
        SymbolConfig::MdRescaled { d, k } => MultiplierSymbol::MdRescaled { d: *d, k: *k },
        SymbolConfig::HelmholtzInverse => MultiplierSymbol::HelmholtzInverse,
    }
}

pub fn model(cfg: &ModelConfig) -> Result<ModelSpec, CliError> {
    let m = match cfg {
        ModelConfig::Free => ModelSpec::Free,
        ModelConfig::Quintic { lambda } => ModelSpec::Quintic { lambda: *lambda },
        ModelConfig::AlphaTruncated { alpha, symbol: s } => {
            if !(*alpha > 0.0 && *alpha <= 1.0) {
                return Err(CliError::invalid("model.alpha", format!("out of range (0, 1]: {alpha}")));
            }
            ModelSpec::AlphaTruncated { alpha: *alpha, symbol: symbol(s) }
        }
        ModelConfig::DTruncated { d } => ModelSpec::DTruncated { d: *d },
        ModelConfig::RescaledTruncated { d, k } => ModelSpec::RescaledTruncated { d: *d, k: *k },
        ModelConfig::TorusTruncated { n_cut, d, k } => ModelSpec::TorusTruncated { n_cut: *n_cut, d: *d, k: *k },
        ModelConfig::Inhomogeneous { h, n, lambda } => {
            ModelSpec::Inhomogeneous { h: h_spec(h, "model.h")?, n: *n, lambda: *lambda }
        }
    };
    m.validate().map_err(core("model"))?;
    Ok(m)
}

fn field(cfg: &FieldConfig, g: &TorusGrid, name: &str, base: &Path) -> Result<SpectralField, CliError> {
    let check = |key: &str, v: f64| -> Result<(), CliError> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(CliError::invalid(&format!("{name}.{key}"), "must be finite"))
        }
    };
    Ok(match cfg {
        FieldConfig::Zero => SpectralField::zeros(g),
        FieldConfig::Gaussian { amplitude, center, width, boost } => {
            check("amplitude", *amplitude)?;
            check("center", *center)?;
            check("boost", *boost)?;
            finite_positive(&format!("{name}.width"), *width)?;
            profiles::gaussian(g, *amplitude, *center, *width, *boost)
        }
        FieldConfig::Sech { amplitude, center, width } => {
            check("amplitude", *amplitude)?;
            check("center", *center)?;
            finite_positive(&format!("{name}.width"), *width)?;
            profiles::sech(g, *amplitude, *center, *width)
        }
        FieldConfig::Lorentzian { amplitude, center, width } => {
            check("amplitude", *amplitude)?;
            check("center", *center)?;
            finite_positive(&format!("{name}.width"), *width)?;
            profiles::lorentzian(g, *amplitude, *center, *width)
        }
        FieldConfig::PlaneWave { amplitude, k } => {
            check("amplitude", *amplitude)?;
            if g.index_of(*k).is_none() {
                return Err(CliError::invalid(&format!("{name}.k"), format!("mode {k} is not resolved by the grid")));
            }
            profiles::plane_wave(g, *amplitude, *k)
        }
        FieldConfig::File { path, snapshot } => {
            let p: PathBuf = base.join(path);
            if !p.is_file() {
                return Err(CliError::invalid(&format!("{name}.path"), format!("file {} does not exist", p.display())));
            }
            let traj = load_trajectory(&p).map_err(|e| CliError::invalid(&format!("{name}.path"), e.to_string()))?;
            let i = snapshot.unwrap_or(traj.len() - 1);
            let snap = traj.snapshots().get(i).ok_or_else(|| {
                CliError::invalid(&format!("{name}.snapshot"), format!("file has {} snapshots", traj.len()))
            })?;
            if snap.grid() != g {
                return Err(CliError::invalid(
                    &format!("{name}.path"),
                    format!("file grid (L={}, n={}) differs from the configured grid", snap.grid().length(), snap.grid().points()),
                ));
            }
            snap.clone()
        }
    })
}

struct Times {
    t_final: f64,
    dt: f64,
    stride: usize,
}

fn times(cfg: &TimeConfig) -> Result<Times, CliError> {
    finite_positive("time.T", cfg.t_final)?;
    let dt = cfg.dt.unwrap_or(cfg.t_final * 2f64.powi(-DEFAULT_DT_EXPONENT));
    finite_positive("time.dt", dt)?;
    if dt > cfg.t_final {
        return Err(CliError::invalid("time.dt", format!("exceeds T = {}", cfg.t_final)));
    }
    let steps = (cfg.t_final / dt).round().max(1.0) as usize;
    let stride = cfg.sample_stride.unwrap_or((steps / DEFAULT_SAMPLES).max(1));
    if stride == 0 {
        return Err(CliError::invalid("time.sample_stride", "must be >= 1"));
    }
    Ok(Times { t_final: cfg.t_final, dt, stride })
}

fn list_check(field: &str, r: nlslab_core::Result<()>) -> Result<(), CliError> {
    r.map_err(core(field))
}

/// Validates `cfg` for `task` and builds the core inputs. `base` anchors
/// relative file paths.
pub fn resolve(cfg: &RunConfig, task: Task, base: &Path) -> Result<Plan, CliError> {
    for (key, name) in [("output.csv", &cfg.output.csv), ("output.json", &cfg.output.json), ("output.trajectory", &cfg.output.trajectory)] {
        let p = Path::new(name);
        if name.is_empty() || p.components().count() != 1 || p.file_name().is_none() {
            return Err(CliError::invalid(key, format!("must be a plain file name inside --out, got `{name}`")));
        }
    }
    if task == Task::Simulate {
        if cfg.experiment.is_some() {
            return Err(CliError::invalid("experiment", "simulate takes no experiment block"));
        }
        let g = grid(need(&cfg.grid, "grid")?, "grid")?;
        let m = model(need(&cfg.model, "model")?)?;
        let u0 = field(need(&cfg.init, "init")?, &g, "init", base)?;
        let t = times(need(&cfg.time, "time")?)?;
        let scheme = StepScheme::new(SchemeKind::for_model(&m), t.dt).map_err(core("time"))?;
        return Ok(Plan::Simulate(SimulatePlan { model: m, u0, t_final: t.t_final, scheme, sample_stride: t.stride }));
    }
    let exp = need(&cfg.experiment, "experiment")?;
    if !task.accepts(exp) {
        return Err(CliError::invalid("experiment.kind", format!("does not match the {task:?} subcommand")));
    }
    let spec = match exp {
        ExperimentConfig::Kernel { l_list, n, t_final, t_min, x_samples, t_samples, tolerance } => {
            list_check("experiment.L_list", nlslab_core::experiments::check_sweep("L_list", l_list))?;
            if l_list[0] <= 0.0 {
                return Err(CliError::invalid("experiment.L_list", "entries must be positive"));
            }
            finite_positive("experiment.N", *n)?;
            finite_positive("experiment.T", *t_final)?;
            let t_min = t_min.unwrap_or(0.05 * t_final);
            if !(t_min > 0.0 && t_min < *t_final) {
                return Err(CliError::invalid("experiment.t_min", format!("need 0 < t_min < T, got {t_min}")));
            }
            finite_positive("experiment.tolerance", *tolerance)?;
            if *t_samples < 2 {
                return Err(CliError::invalid("experiment.t_samples", "need at least two"));
            }
            return Ok(Plan::Kernel(KernelPlan {
                l_list: l_list.clone(),
                n: *n,
                t_final: *t_final,
                t_min,
                x_samples: *x_samples,
                t_samples: *t_samples,
                tolerance: *tolerance,
            }));
        }
        ExperimentConfig::Homogenization { h, lambda, n_list, radius, samples } => {
            let g = grid(need(&cfg.grid, "grid")?, "grid")?;
            let t = times(need(&cfg.time, "time")?)?;
            finite_positive("experiment.lambda", *lambda)?;
            ExperimentSpec::Homogenization(HomogenizationSpec {
                h: h_spec(h, "experiment.h")?,
                lambda: *lambda,
                n_list: n_list.clone(),
                u0: field(need(&cfg.init, "init")?, &g, "init", base)?,
                t_final: t.t_final,
                dt: t.dt,
                samples: *samples,
                radius: *radius,
            })
        }
        ExperimentConfig::TorusApprox(c) | ExperimentConfig::MassConcentration(c) => {
            let t = times(need(&cfg.time, "time")?)?;
            grid(&GridConfig { length: c.length, points: c.points }, "experiment")?;
            let s = TorusApproxSpec {
                core_mass: c.core_mass,
                d: c.d,
                k_list: c.k_list.clone(),
                eps_list: c.eps_list.clone(),
                t_final: t.t_final,
                dt: t.dt,
                samples: c.samples,
                length: c.length,
                points: c.points,
                background: c.background,
            };
            if matches!(exp, ExperimentConfig::TorusApprox(_)) {
                ExperimentSpec::TorusApprox(s)
            } else {
                ExperimentSpec::MassConcentration(s)
            }
        }
        ExperimentConfig::WeakConvergence { core: c, bump, x_shift_list, m_list, d, functionals, t_list } => {
            let g = grid(need(&cfg.grid, "grid")?, "grid")?;
            let t = times(need(&cfg.time, "time")?)?;
            if t_list.iter().any(|v| *v > t.t_final) {
                return Err(CliError::invalid("experiment.t_list", format!("entries must not exceed T = {}", t.t_final)));
            }
            let functionals = functionals
                .iter()
                .enumerate()
                .map(|(i, f)| field(f, &g, &format!("experiment.functionals[{i}]"), base))
                .collect::<Result<Vec<_>, _>>()?;
            ExperimentSpec::WeakConvergence(WeakSpec {
                core: field(c, &g, "experiment.core", base)?,
                bump: field(bump, &g, "experiment.bump", base)?,
                shifts: x_shift_list.clone(),
                m_list: m_list.clone(),
                d: *d,
                functionals,
                t_list: t_list.clone(),
                dt: t.dt,
            })
        }
        ExperimentConfig::Nonsqueezing { z_star, ell, alpha, r, sample_count } => {
            let g = grid(need(&cfg.grid, "grid")?, "grid")?;
            let t = times(need(&cfg.time, "time")?)?;
            finite_positive("experiment.r", *r)?;
            ExperimentSpec::Nonsqueezing(NonsqueezeSpec {
                z_star: field(z_star, &g, "experiment.z_star", base)?,
                ell: field(ell, &g, "experiment.ell", base)?,
                alpha: Complex64::new(alpha[0], alpha[1]),
                r: *r,
                t_final: t.t_final,
                model: model(need(&cfg.model, "model")?)?,
                dt: t.dt,
                sample_count: *sample_count,
                seed: cfg.seed,
            })
        }
        ExperimentConfig::Stability { forcing, data_perturbation, eps_list, samples } => {
            let g = grid(need(&cfg.grid, "grid")?, "grid")?;
            let t = times(need(&cfg.time, "time")?)?;
            ExperimentSpec::Stability(StabilitySpec {
                model: model(need(&cfg.model, "model")?)?,
                u0: field(need(&cfg.init, "init")?, &g, "init", base)?,
                forcing: field(forcing, &g, "experiment.forcing", base)?,
                data_perturbation: field(data_perturbation, &g, "experiment.data_perturbation", base)?,
                eps_list: eps_list.clone(),
                t_final: t.t_final,
                dt: t.dt,
                samples: *samples,
            })
        }
    };
    validate_spec(&spec)?;
    Ok(Plan::Experiment(spec))
}

fn validate_spec(spec: &ExperimentSpec) -> Result<(), CliError> {
    let r = match spec {
        ExperimentSpec::Homogenization(s) => s.validate(),
        ExperimentSpec::TorusApprox(s) | ExperimentSpec::MassConcentration(s) => s.validate(),
        ExperimentSpec::WeakConvergence(s) => s.validate(),
        ExperimentSpec::Nonsqueezing(s) => s.validate(),
        ExperimentSpec::Stability(s) => s.validate(),
    };
    r.map_err(core("experiment"))
}

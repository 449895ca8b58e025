//! Argument parsing and subcommand dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nlslab_core::estimates::kernel_dispersive_constant;
use nlslab_core::experiments::{ExperimentReport, Verdict};
use nlslab_core::propagators::{energy, evolve};
use nlslab_core::selfcheck;

use crate::config::{parse_config, resolve, KernelPlan, Plan, RunConfig, SimulatePlan, Task};
use crate::error::CliError;
use crate::report_io::{emit_report, RunInfo};
use crate::trajfile::save_trajectory;

/// Simulation mass drift allowed by the `simulate` verdicts.
pub const SIMULATE_MASS_TOL: f64 = 1e-8;
pub const SIMULATE_ENERGY_TOL: f64 = 1e-6;
/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "NLSLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nlslab", version, about = "Numerical laboratory for the 1D quintic NLS on rescaled tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one initial state and save the trajectory.
    Simulate(RunArgs),
    /// Sweep the dispersive kernel constant over torus lengths.
    Kernel(RunArgs),
    /// Oscillating-coefficient convergence sweep.
    Homogenize(RunArgs),
    /// Line-to-torus approximation sweep.
    TorusApprox(RunArgs),
    /// Weak-limit pairing sweep.
    WeakLimit(RunArgs),
    /// Non-squeezing probe.
    Nonsqueeze(RunArgs),
    /// Response to an eps-sized error.
    Stability(RunArgs),
    /// Run the built-in invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving every output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Also write check.csv and check.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    let (result, quiet) = match cli.command {
        Command::Check(a) => (run_check(&a), a.quiet),
        Command::Simulate(a) => (run_task(Task::Simulate, &a), a.quiet),
        Command::Kernel(a) => (run_task(Task::Kernel, &a), a.quiet),
        Command::Homogenize(a) => (run_task(Task::Homogenize, &a), a.quiet),
        Command::TorusApprox(a) => (run_task(Task::TorusApprox, &a), a.quiet),
        Command::WeakLimit(a) => (run_task(Task::WeakLimit, &a), a.quiet),
        Command::Nonsqueeze(a) => (run_task(Task::Nonsqueeze, &a), a.quiet),
        Command::Stability(a) => (run_task(Task::Stability, &a), a.quiet),
    };
    match result {
        Ok(report) => {
            if !quiet {
                print_summary(&report);
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn print_summary(report: &ExperimentReport) {
    for v in &report.verdicts {
        eprintln!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    eprintln!("{}: {} ({} rows)", report.kind, report.overall(), report.rows.len());
}

fn load(path: &Path) -> Result<(Vec<u8>, RunConfig), CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::ConfigRead { path: path.display().to_string(), source })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Syntax {
        line: 0,
        column: 0,
        message: format!("config is not UTF-8: {e}"),
    })?;
    let cfg = parse_config(text)?;
    Ok((bytes, cfg))
}

/// Runs one config-driven subcommand and writes its reports under `--out`.
pub fn run_task(task: Task, args: &RunArgs) -> Result<ExperimentReport, CliError> {
    let (bytes, mut cfg) = load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let plan = resolve(&cfg, task, &base)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::output(&args.out, e))?;
    let report = match plan {
        Plan::Simulate(p) => simulate(&p, &args.out.join(&cfg.output.trajectory))?,
        Plan::Kernel(p) => kernel(&p)?,
        Plan::Experiment(spec) => spec.run()?,
    };
    let info = RunInfo { config_bytes: &bytes, seed: cfg.seed };
    emit_report(&report, &args.out.join(&cfg.output.csv), &args.out.join(&cfg.output.json), info)?;
    Ok(report)
}

fn relative_change(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        (value - reference).abs()
    } else {
        ((value - reference) / reference).abs()
    }
}

/// Evolves, saves the trajectory, and reports the conserved quantities.
pub fn simulate(p: &SimulatePlan, traj_path: &Path) -> Result<ExperimentReport, CliError> {
    let traj = evolve(&p.model, &p.u0, p.t_final, &p.scheme, p.sample_stride)?;
    save_trajectory(&traj, traj_path)?;
    let mut r = ExperimentReport::new("simulate", "t", &["mass", "energy", "mass_drift", "energy_drift"], &[]);
    let (m0, e0) = (traj.initial().mass(), energy(traj.initial(), &p.model));
    for (t, u) in traj.times().iter().zip(traj.snapshots()) {
        let (m, e) = (u.mass(), energy(u, &p.model));
        r.push_row(t.to_string(), vec![m, e, relative_change(m, m0), relative_change(e, e0)], vec![]);
    }
    let (dm, de) = (traj.mass_drift(), traj.energy_drift(&p.model));
    r.verdict(Verdict::new(
        "mass_conserved",
        dm < SIMULATE_MASS_TOL,
        format!("max relative mass drift {dm:.3e} (limit {SIMULATE_MASS_TOL:e})"),
    ));
    r.verdict(Verdict::new(
        "energy_conserved",
        de < SIMULATE_ENERGY_TOL,
        format!("max relative energy drift {de:.3e} (limit {SIMULATE_ENERGY_TOL:e})"),
    ));
    r.note("model", format!("{:?}", p.model));
    r.note("scheme", p.scheme.kind.name());
    r.note("dt", p.scheme.dt);
    r.note("T", p.t_final);
    r.note("grid", format!("L={} n={}", p.u0.grid().length(), p.u0.grid().points()));
    r.note("sample_stride", p.sample_stride);
    Ok(r)
}

/// `sup |t|^{1/2} |K|` for each length, checked for stability as L doubles.
pub fn kernel(p: &KernelPlan) -> Result<ExperimentReport, CliError> {
    let mut r = ExperimentReport::new("kernel", "L", &["constant", "argmax_t", "argmax_x"], &["quadrature_error"]);
    let mut values = Vec::with_capacity(p.l_list.len());
    for &l in &p.l_list {
        let rep = kernel_dispersive_constant(l, p.n, p.t_final, p.t_min, p.x_samples, p.t_samples)?;
        let at = |k: &str| rep.param(k).unwrap_or(f64::NAN);
        r.push_row(l.to_string(), vec![rep.value, at("argmax_t"), at("argmax_x")], vec![rep.quadrature_error_estimate]);
        values.push(rep.value);
        r.note(&format!("resolution_L{l}"), format!("{}x{}", rep.resolution.0, rep.resolution.1));
    }
    let worst = values.windows(2).map(|w| relative_change(w[1], w[0])).fold(0.0, f64::max);
    r.verdict(Verdict::new(
        "finite_constant",
        values.iter().all(|v| v.is_finite()),
        format!("constants {values:?}"),
    ));
    r.verdict(Verdict::new(
        "stable_under_length_change",
        worst < p.tolerance,
        format!("largest relative change between consecutive L {worst:.4} (limit {})", p.tolerance),
    ));
    r.note("N", p.n);
    r.note("T", p.t_final);
    r.note("t_min", p.t_min);
    r.note("t_samples", p.t_samples);
    r.note("x_samples", p.x_samples);
    Ok(r)
}

/// Runs the invariant suite; with `--out`, also writes check.csv/json.
pub fn run_check(args: &CheckArgs) -> Result<ExperimentReport, CliError> {
    let outcomes = selfcheck::run_all();
    let mut r = ExperimentReport::new("check", "check", &["passed"], &[]);
    for o in &outcomes {
        let name = format!("{}.{}", o.module, o.name);
        r.push_row(name.clone(), vec![if o.passed { 1.0 } else { 0.0 }], vec![]);
        r.verdict(Verdict::new(name, o.passed, o.detail.clone()));
    }
    if let Some(out) = &args.out {
        fs::create_dir_all(out).map_err(|e| CliError::output(out, e))?;
        emit_report(&r, &out.join("check.csv"), &out.join("check.json"), RunInfo { config_bytes: b"", seed: 0 })?;
    }
    Ok(r)
}

use num_complex::Complex64;

use super::report::{firewall, resample, run_rows, strictly_decreasing, ExperimentReport, Resolution, Verdict};
use crate::error::{invalid, Result};
use crate::propagators::{evolve, ModelSpec, SchemeKind, StepScheme};
use crate::spectral_core::SpectralField;

/// Inputs for the weak-topology sweep. Row `i` evolves
/// `core + bump(. - x_i)` under the `m_D(. / M_i)`-truncated equation.
#[derive(Clone, Debug)]
pub struct WeakSpec {
    pub core: SpectralField,
    /// Centred at the origin; shifted per row.
    pub bump: SpectralField,
    pub shifts: Vec<f64>,
    pub m_list: Vec<f64>,
    pub d: u64,
    pub functionals: Vec<SpectralField>,
    pub t_list: Vec<f64>,
    pub dt: f64,
}

impl WeakSpec {
    pub fn validate(&self) -> Result<()> {
        super::check_sweep("x_shift_list", &self.shifts)?;
        super::check_sweep("M_list", &self.m_list)?;
        super::check_sweep("t_list", &self.t_list)?;
        if self.shifts.len() != self.m_list.len() {
            return Err(invalid("M_list", "must have one entry per shift"));
        }
        if self.functionals.is_empty() {
            return Err(invalid("functionals", "need at least one test functional"));
        }
        let g = self.core.grid();
        self.core.check_grid(&self.bump)?;
        for f in &self.functionals {
            self.core.check_grid(f)?;
        }
        if !(self.t_list[0] > 0.0) || !(self.dt > 0.0) {
            return Err(invalid("t_list", "times and dt must be positive"));
        }
        let reach = self.shifts.last().expect("non-empty").abs() + 8.0 * rms_width(&self.bump);
        if reach > 0.5 * g.length() {
            return Err(invalid(
                "x_shift_list",
                format!("bump at the largest shift reaches {reach:.3}, beyond the safe half-period {}", 0.5 * g.length()),
            ));
        }
        Ok(())
    }
}

/// `sqrt(int x^2 |f|^2 / int |f|^2)` with `x` centred on the grid.
fn rms_width(f: &SpectralField) -> f64 {
    let m = f.mass();
    if m == 0.0 {
        return 0.0;
    }
    let s = f.samples();
    let dx = f.grid().dx();
    (dx * f.grid().nodes().iter().zip(&s).map(|(x, v)| x * x * v.norm_sqr()).sum::<f64>() / m).sqrt()
}

/// `f(. - x)`, exact for band-limited fields.
fn translate(f: &SpectralField, x: f64) -> SpectralField {
    let tau = 2.0 * std::f64::consts::PI;
    f.map_coefficients(|xi, c| c * Complex64::from_polar(1.0, -tau * xi * x))
}

fn snapshots_at(model: &ModelSpec, u0: &SpectralField, times: &[f64], dt: f64) -> Result<Vec<SpectralField>> {
    let scheme = StepScheme::new(SchemeKind::LawsonRk4, dt)?;
    let mut out = Vec::with_capacity(times.len());
    let (mut u, mut t) = (u0.clone(), 0.0);
    for &target in times {
        let traj = evolve(model, &u, target - t, &scheme, usize::MAX)?;
        u = traj.last().clone();
        t = target;
        out.push(u.clone());
    }
    Ok(out)
}

fn column_name(g: usize, t: f64) -> String {
    format!("gap_g{g}_t{t}")
}

/// Pairing gaps `|<g, u_n(t)> - <g, u_inf(t)>|` for each shift, functional and time.
pub fn run_weak_convergence(spec: &WeakSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let grid = spec.core.grid().clone();
    let names: Vec<String> = (0..spec.functionals.len())
        .flat_map(|g| spec.t_list.iter().map(move |t| column_name(g, *t)))
        .collect();
    let mut cols: Vec<&str> = vec!["x_shift", "M"];
    cols.extend(names.iter().map(String::as_str));
    let mut report = ExperimentReport::new("weak_convergence", "x_n", &cols, &[]);
    report.note("grid_length", grid.length());
    report.note("grid_points", grid.points());
    report.note("D", spec.d);
    report.note("dt", spec.dt);
    for (j, f) in spec.functionals.iter().enumerate() {
        report.note(&format!("functional_{j}_mass"), f.mass());
        report.note(&format!("functional_{j}_rms_width"), rms_width(f));
    }

    let reference = |res: Resolution| -> Result<Vec<SpectralField>> {
        let g = res.grid(&grid)?;
        snapshots_at(&ModelSpec::Quintic { lambda: 1.0 }, &resample(&spec.core, &g)?, &spec.t_list, res.dt(spec.dt))
    };
    let base_ref = reference(Resolution::BASE)?;
    let fine_ref = reference(Resolution::REFINED)?;
    let row = |i: usize, res: Resolution| -> Result<Vec<f64>> {
        let g = res.grid(&grid)?;
        let limit = if res == Resolution::BASE { &base_ref } else { &fine_ref };
        let u0 = resample(&spec.core, &g)?.add(&resample(&translate(&spec.bump, spec.shifts[i]), &g)?)?;
        let model = ModelSpec::RescaledTruncated { d: spec.d, k: spec.m_list[i] };
        let un = snapshots_at(&model, &u0, &spec.t_list, res.dt(spec.dt))?;
        let mut out = vec![spec.shifts[i], spec.m_list[i]];
        for f in &spec.functionals {
            let f = resample(f, &g)?;
            for (a, b) in un.iter().zip(limit) {
                out.push((a.inner(&f)? - b.inner(&f)?).norm());
            }
        }
        Ok(out)
    };
    let rows = run_rows(spec.shifts.len(), Resolution::BASE, row)?;
    for (x, r) in spec.shifts.iter().zip(&rows) {
        report.push_row(x.to_string(), r.clone(), vec![]);
    }
    let watched: Vec<usize> = (2..cols.len()).collect();
    firewall(&mut report, &watched, rows.len(), row, &rows)?;

    if rows.len() >= 2 {
        let mut failing = Vec::new();
        for name in &names {
            let c = report.column(name).expect("column exists");
            let trivial = c.iter().all(|v| *v == 0.0);
            if !trivial && !(strictly_decreasing(&c) && c[c.len() - 1] < 0.25 * c[0]) {
                failing.push(name.clone());
            }
        }
        report.verdict(Verdict::new(
            "gaps_decreasing_final_below_quarter",
            failing.is_empty(),
            if failing.is_empty() { "every (g, t) column".to_string() } else { format!("failing columns {failing:?}") },
        ));
    }
    Ok(report)
}

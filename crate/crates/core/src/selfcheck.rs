//! Fast invariant suite behind the `check` subcommand.
//!
//! Scaling laws are checked as upper bounds here: every operator norm must
//! drop by at least the law's factor (within 25%) per doubling. The two-sided
//! version lives in the acceptance tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::estimates::{
    dense_operator_norm, dispersive_kernel, homogenization_defect, kernel_on_period, operator_norm_l2, OperatorSpec,
};
use crate::experiments::{
    run_homogenization, run_nonsqueezing_probe, run_stability_check, HomogenizationSpec, NonsqueezeSpec,
    StabilitySpec,
};
use crate::profiles;
use crate::propagators::{
    energy, evolve_auto, linear_flow, reverse_check, HSpec, ModelSpec, SchemeKind, StepScheme,
};
use crate::seed::{splitmix64, SeedStream};
use crate::spectral_core::{eval_md, make_grid, smoothstep, synthesize, MultiplierSymbol, SpectralField};
use crate::symmetries::{
    apply_G, build_cutoffs, periodic_extension, push_forward, CutoffParams, SymmetryFrame,
};

/// One invariant and whether it held.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, &str, Check)] = &[
    ("spectral_core", "transform_round_trip", round_trip),
    ("spectral_core", "md_range_support_monotone", md_lattice),
    ("spectral_core", "md_reference_value", md_value),
    ("spectral_core", "md_difference_bound", md_difference),
    ("propagators", "gaussian_closed_form", gaussian_closed_form),
    ("propagators", "quintic_conservation", conservation),
    ("propagators", "strang_reversibility", reversibility),
    ("symmetries", "frame_inverse", frame_inverse),
    ("symmetries", "transfer_adjoint", transfer_adjoint),
    ("symmetries", "cutoff_bounds", cutoff_bounds),
    ("estimates", "power_iteration_vs_dense", power_vs_dense),
    ("estimates", "operator_decay_laws", decay_laws),
    ("estimates", "homogenization_defect_formula", defect_formula),
    ("estimates", "kernel_fft_vs_direct", kernel_consistency),
    ("experiments", "constant_h_identical", constant_h),
    ("experiments", "nonsqueeze_analytic_cases", nonsqueeze_cases),
    ("experiments", "stability_zero_eps", stability_zero),
    ("seed", "splitmix_reference", seed_reference),
];

/// Runs every check; the order is fixed.
pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(module, name, f)| {
            let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome { module, name, passed, detail }
        })
        .collect()
}

fn round_trip() -> Result<(bool, String)> {
    let g = make_grid(12.0, 256)?;
    let mut rng = SeedStream::new(11).rng(0);
    let s: Vec<Complex64> = (0..256).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let f = synthesize(&g, &s)?;
    let back = f.samples();
    let err = s.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let direct = g.dx() * s.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let parseval = (direct - f.mass()).abs() / direct;
    Ok((err < 1e-13 && parseval < 1e-13, format!("max sample error {err:.2e}, Parseval mismatch {parseval:.2e}")))
}

fn md_lattice() -> Result<(bool, String)> {
    for d in [2u64, 16, 1024] {
        let top = 2 * d + 2;
        let mut prev = f64::INFINITY;
        for k in 0..=(top * 16) {
            let xi = k as f64 / 16.0;
            let m = eval_md(xi, d)?;
            let ok = (0.0..=1.0).contains(&m)
                && (xi > 1.0 || m == 1.0)
                && (xi < 2.0 * d as f64 || m == 0.0)
                && m <= prev
                && eval_md(-xi, d)? == m;
            if !ok {
                return Ok((false, format!("D = {d} fails at xi = {xi} (m = {m})")));
            }
            prev = m;
        }
    }
    Ok((true, "D in {2, 16, 1024} on the 1/16 lattice".into()))
}

fn md_value() -> Result<(bool, String)> {
    let v = eval_md(2.0, 1024)?;
    let err = (v - 10.0 / 11.0).abs();
    Ok((err < 1e-12, format!("m_1024(2) = {v:.15}, error {err:.1e}")))
}

fn md_difference() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for d in [2u64, 16, 1024] {
        let bound = 1.0 / ((2 * d) as f64).log2();
        for k in 0..=(4 * d * 16) {
            let xi = k as f64 / 16.0;
            worst = worst.max((eval_md(xi, d)? - eval_md(2.0 * xi, d)?).abs() / bound);
        }
    }
    Ok((worst <= 1.0 + 1e-12, format!("max |m(xi) - m(2 xi)| log2(2D) = {worst:.6}")))
}

fn gaussian_closed_form() -> Result<(bool, String)> {
    let g = make_grid(64.0, 2048)?;
    let u0 = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.0);
    let u = linear_flow(&u0, 1.0);
    let z = Complex64::new(1.0, 2.0);
    let exact = SpectralField::from_fn(&g, |x| (-(x * x) / (2.0 * z)).exp() / z.sqrt());
    let err = u.distance(&exact)?;
    Ok((err < 1e-6, format!("L2 error {err:.2e} at t = 1")))
}

fn conservation() -> Result<(bool, String)> {
    let g = make_grid(32.0, 512)?;
    let u0 = profiles::sech(&g, 1.0, 0.0, 1.0);
    let model = ModelSpec::Quintic { lambda: 1.0 };
    let tr = evolve_auto(&model, &u0, 0.25, SchemeKind::StrangExact, 16)?;
    let (dm, de) = (tr.mass_drift(), tr.energy_drift(&model));
    Ok((dm < 1e-8 && de < 1e-6, format!("mass drift {dm:.2e}, energy drift {de:.2e} (E0 = {:.6})", energy(&u0, &model))))
}

fn reversibility() -> Result<(bool, String)> {
    let g = make_grid(32.0, 256)?;
    let u0 = profiles::sech(&g, 1.0, 0.0, 1.0);
    let e = reverse_check(&ModelSpec::Quintic { lambda: 1.0 }, &u0, 0.5, &StepScheme::new(SchemeKind::StrangExact, 1.0 / 256.0)?)?;
    Ok((e < 1e-10, format!("forward-backward error {e:.2e}")))
}

fn frame_inverse() -> Result<(bool, String)> {
    let g = make_grid(32.0, 512)?;
    let u = profiles::gaussian(&g, 1.0, 0.5, 1.0, 0.25);
    // t = 1/pi makes the inverse translation 4 pi b t land on a node.
    let mut f = SymmetryFrame::new(1.0, 3.0 / 32.0, 10.0 * g.dx(), 1.0 / PI);
    f.gauge = 0.7;
    let back = apply_G(&f.inverse(), &apply_G(&f, &u)?)?;
    let err = back.distance(&u)?;
    Ok((err < 1e-10, format!("||G^-1 G u - u|| = {err:.2e}")))
}

fn transfer_adjoint() -> Result<(bool, String)> {
    let torus = make_grid(8.0, 64)?;
    let line = make_grid(32.0, 256)?;
    let f = profiles::gaussian(&line, 1.0, 1.5, 2.0, 0.3);
    let h = profiles::sech(&torus, 0.7, -1.0, 1.0);
    let a = push_forward(&f, &torus)?.inner(&h)?;
    let b = f.inner(&periodic_extension(&h, &line)?)?;
    let err = (a - b).norm() / a.norm();
    Ok((err < 1e-12, format!("<p_* f, h> vs <f, p^* h>: relative gap {err:.2e}")))
}

fn cutoff_bounds() -> Result<(bool, String)> {
    let g = make_grid(256.0, 2048)?;
    let u0 = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.0);
    let c = build_cutoffs(CutoffParams { d: 2.0, k: 1.0, t: 0.25, eta: 0.5, eps: 1e-6 }, &u0)?;
    let r = c.report();
    let ok = r.max_slope <= r.slope_bound * (1.0 + 1e-9) && r.min_gap >= r.gap_bound * (1.0 - 1e-9);
    Ok((ok, format!("slope {:.4} <= {:.4}, gap {:.4} >= {:.4}", r.max_slope, r.slope_bound, r.min_gap, r.gap_bound)))
}

fn smooth_indicator(g: &crate::spectral_core::TorusGrid) -> Vec<f64> {
    g.nodes().iter().map(|x| smoothstep((x.abs() - 4.0) / 8.0)).collect()
}

fn power_vs_dense() -> Result<(bool, String)> {
    let g = make_grid(32.0, 256)?;
    let op = OperatorSpec::commutator(
        OperatorSpec::Mask(smooth_indicator(&g)),
        OperatorSpec::Multiplier(MultiplierSymbol::MdRescaled { d: 2, k: 1.0 }),
    );
    let p = operator_norm_l2(&op, &g, 400, 1)?.value;
    let d = dense_operator_norm(&op, &g)?;
    let rel = (p - d).abs() / d;
    Ok((rel < 0.02, format!("power {p:.6e} vs dense {d:.6e}")))
}

fn decay_laws() -> Result<(bool, String)> {
    let g = make_grid(32.0, 1024)?;
    let chi = smooth_indicator(&g);
    let mut norms = Vec::new();
    for k in [1.0, 2.0, 4.0] {
        let op = OperatorSpec::commutator(
            OperatorSpec::Mask(chi.clone()),
            OperatorSpec::Multiplier(MultiplierSymbol::MdRescaled { d: 2, k }),
        );
        norms.push(operator_norm_l2(&op, &g, 400, 1)?.value);
    }
    let worst = norms.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    Ok((worst <= 0.5 * 1.25, format!("commutator norms {norms:?}, worst ratio per doubling {worst:.3}")))
}

fn defect_formula() -> Result<(bool, String)> {
    let g = make_grid(32.0, 2048)?;
    let mut worst: f64 = 0.0;
    for n in [1u32, 2, 4, 8, 16] {
        let v = homogenization_defect(&HSpec::OnePlusCos, n, 8.0, &g)?.value;
        worst = worst.max((v - 1.0 / (1.0 + 4.0 * PI * PI * (n * n) as f64)).abs());
    }
    Ok((worst < 1e-10, format!("max deviation from 1/(1 + 4 pi^2 n^2): {worst:.2e}")))
}

fn kernel_consistency() -> Result<(bool, String)> {
    let (l, n, t) = (16.0, 2.0, 0.7);
    let fft = kernel_on_period(l, n, t, 0);
    let m = fft.len();
    let mut worst: f64 = 0.0;
    for j in [0usize, 1, 7, m / 3, m / 2] {
        let x = j as f64 * l / m as f64;
        worst = worst.max((fft[j] - dispersive_kernel(l, n, t, x)).norm());
    }
    let sym = (dispersive_kernel(l, n, t, 1.3) - dispersive_kernel(l, n, t, -1.3)).norm();
    Ok((worst < 1e-12 && sym == 0.0, format!("FFT vs direct {worst:.2e}, parity gap {sym:.1e}")))
}

fn constant_h() -> Result<(bool, String)> {
    let g = make_grid(16.0, 128)?;
    let spec = HomogenizationSpec {
        h: HSpec::Constant(1.5),
        lambda: 1.0,
        n_list: vec![1, 4],
        u0: profiles::sech(&g, 1.0, 0.0, 1.0),
        t_final: 0.25,
        dt: 1.0 / 256.0,
        samples: 8,
        radius: 4.0,
    };
    let r = run_homogenization(&spec)?;
    let worst = r.column("l6_difference").unwrap_or_default().into_iter().fold(0.0, f64::max);
    Ok((worst < 1e-8, format!("max L6 difference {worst:.2e}")))
}

fn nonsqueeze_cases() -> Result<(bool, String)> {
    let g = make_grid(16.0, 128)?;
    let ell = profiles::gaussian(&g, 1.0, 0.5, 1.0, 0.0);
    let r = 0.1;
    let free = NonsqueezeSpec {
        z_star: SpectralField::zeros(&g),
        ell: ell.clone(),
        alpha: Complex64::new(0.0, 0.0),
        r,
        t_final: 0.5,
        model: ModelSpec::Free,
        dt: 1.0 / 64.0,
        sample_count: 4,
        seed: 3,
    };
    let a = run_nonsqueezing_probe(&free)?;
    let best = a.column("defect").unwrap_or_default().into_iter().fold(0.0, f64::max);
    let z = profiles::sech(&g, 0.8, 0.0, 1.0);
    let alpha = Complex64::new(0.2, -0.1);
    let still = NonsqueezeSpec { z_star: z.clone(), alpha, t_final: 0.0, model: ModelSpec::Quintic { lambda: 1.0 }, ..free };
    let b = run_nonsqueezing_probe(&still)?;
    let want = (z.inner(&profiles::normalized(&ell))? - alpha).norm() + r;
    let got = b.column("defect").unwrap_or_default()[0];
    let (e1, e2) = ((best - r).abs(), (got - want).abs());
    Ok((e1 < 1e-10 && e2 < 1e-10, format!("free max defect - r = {e1:.1e}; T = 0 formula error {e2:.1e}")))
}

fn stability_zero() -> Result<(bool, String)> {
    let g = make_grid(16.0, 128)?;
    let spec = StabilitySpec {
        model: ModelSpec::Quintic { lambda: 1.0 },
        u0: profiles::sech(&g, 1.0, 0.0, 1.0),
        forcing: profiles::gaussian(&g, 1.0, 1.0, 1.0, 0.0),
        data_perturbation: profiles::gaussian(&g, 1.0, -1.0, 1.0, 0.0),
        eps_list: vec![0.0],
        t_final: 0.25,
        dt: 1.0 / 256.0,
        samples: 8,
    };
    let r = run_stability_check(&spec)?;
    let d = r.column("l6_difference").unwrap_or_default()[0];
    Ok((d < 1e-8, format!("difference {d:.2e} at eps = 0")))
}

fn seed_reference() -> Result<(bool, String)> {
    let v = splitmix64(0);
    Ok((v == 0xE220_A839_7B1D_CDAF, format!("splitmix64(0) = {v:#018X}")))
}

use std::f64::consts::PI;

use nlslab_core::profiles;
use nlslab_core::propagators::{
    energy, evolve, evolve_auto, linear_flow, nonlinear_term, quintic_phase_substep, reverse_check, HSpec,
    ModelSpec, PhaseWeight, SchemeKind, StepScheme,
};
use nlslab_core::spectral_core::{apply_multiplier, make_grid, MultiplierSymbol, SpectralField, TorusGrid};
use nlslab_core::symmetries::{apply_g, SymmetryFrame};
use nlslab_core::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn run(model: &ModelSpec, u: &SpectralField, t: f64, kind: SchemeKind, dt: f64) -> SpectralField {
    evolve(model, u, t, &StepScheme::new(kind, dt).unwrap(), usize::MAX).unwrap().last().clone()
}

/// Free solution from `exp(-x^2 / (2 w^2))`: the variance grows as `w^2 + 2 i t`.
fn gaussian_closed_form(grid: &TorusGrid, w: f64, t: f64) -> SpectralField {
    let s = Complex64::new(w * w, 2.0 * t);
    SpectralField::from_fn(grid, |x| (c(w * w) / s).sqrt() * (-(x * x) / (2.0 * s)).exp())
}

#[test]
fn gaussian_free_evolution_matches_closed_form() {
    let g = make_grid(64.0, 2048).unwrap();
    let u0 = profiles::gaussian(&g, 1.0, 0.0, 1.0, 0.0);
    let err = linear_flow(&u0, 1.0).distance(&gaussian_closed_form(&g, 1.0, 1.0)).unwrap();
    assert!(err < 1e-6, "{err:.3e}");
    let stepped = run(&ModelSpec::Free, &u0, 1.0, SchemeKind::LawsonRk4, 1.0 / 64.0);
    assert!(stepped.distance(&linear_flow(&u0, 1.0)).unwrap() < 1e-12);
}

#[test]
fn linear_flow_is_a_unitary_group() {
    let g = make_grid(12.0, 128).unwrap();
    let u = profiles::gaussian(&g, 0.8, 1.0, 0.9, 0.5);
    let a = linear_flow(&linear_flow(&u, 0.3), 0.45);
    assert!(a.distance(&linear_flow(&u, 0.75)).unwrap() < 1e-13);
    assert!(linear_flow(&linear_flow(&u, 0.6), -0.6).distance(&u).unwrap() < 1e-13);
    assert!((linear_flow(&u, 2.0).mass() - u.mass()).abs() < 1e-13);
}

#[test]
fn nonlinear_term_examples() {
    let g = make_grid(4.0, 32).unwrap();
    let z = SpectralField::zeros(&g);
    assert_eq!(nonlinear_term(&ModelSpec::Quintic { lambda: 1.0 }, &z).norm(), 0.0);

    // Constant a: N = lambda |a|^4 a with no aliasing to worry about.
    let a = Complex64::new(0.6, -0.2);
    let u = SpectralField::from_fn(&g, |_| a);
    let n = nonlinear_term(&ModelSpec::Quintic { lambda: 2.5 }, &u);
    assert!((n.coefficient(0) - 2.5 * a.norm_sqr().powi(2) * a).norm() < 1e-14);
    assert!(nonlinear_term(&ModelSpec::Free, &u).norm() == 0.0);

    // A single mode e^{2 pi i k x / L}: |u|^4 u is the same mode, no spill.
    let m = SpectralField::mode(&g, 3, c(0.7)).unwrap();
    let n = nonlinear_term(&ModelSpec::Quintic { lambda: 1.0 }, &m);
    assert!((n.coefficient(3) - c(0.7f64.powi(5))).norm() < 1e-14);
    assert!((n.norm_sqr_sum_except(3)) < 1e-28);

    // Truncated models act through their projection: a mode beyond 2D has no nonlinearity.
    let far = SpectralField::mode(&g, 15, c(1.0)).unwrap();
    assert!(nonlinear_term(&ModelSpec::DTruncated { d: 1 }, &far).norm() < 1e-15);
}

trait Spill {
    fn norm_sqr_sum_except(&self, k: i64) -> f64;
}

impl Spill for SpectralField {
    fn norm_sqr_sum_except(&self, k: i64) -> f64 {
        let g = self.grid();
        self.coefficients().iter().enumerate().filter(|(i, _)| g.wavenumber(*i) != k).map(|(_, v)| v.norm_sqr()).sum()
    }
}

#[test]
fn phase_substep_matches_nodewise_ode() {
    let g = make_grid(1.0, 64).unwrap();
    let n = 3.0;
    let nodes = g.nodes();
    let w: Vec<f64> = nodes.iter().map(|x| 1.0 + (2.0 * PI * n * x).cos()).collect();
    let u = profiles::gaussian(&g, 1.1, 0.1, 0.2, 2.0);
    let dt = 0.4;
    let out = quintic_phase_substep(&u, dt, &PhaseWeight::Nodes(w.clone())).samples();

    // Independent oracle: classical RK4 on z' = -i w |z|^4 z at each node.
    let steps = 4000;
    let h = dt / steps as f64;
    for ((z0, wj), got) in u.samples().iter().zip(&w).zip(&out) {
        let f = |z: Complex64| Complex64::new(0.0, -wj) * z.norm_sqr().powi(2) * z;
        let mut z = *z0;
        for _ in 0..steps {
            let k1 = f(z);
            let k2 = f(z + 0.5 * h * k1);
            let k3 = f(z + 0.5 * h * k2);
            let k4 = f(z + h * k3);
            z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((z - got).norm() < 1e-10, "{z} vs {got}");
    }
}

#[test]
fn auto_step_conserves_mass() {
    let g = make_grid(32.0, 256).unwrap();
    let u = profiles::sech(&g, 1.0, 0.0, 1.0);
    let q = ModelSpec::Quintic { lambda: 1.0 };
    let tr = evolve_auto(&q, &u, 0.25, SchemeKind::StrangExact, 16).unwrap();
    assert!(tr.mass_drift() < 1e-9);
    assert!(tr.energy_drift(&q) < 1e-6);
    assert_eq!(tr.times().len(), 17);
}

fn richardson_slope(model: &ModelSpec, u: &SpectralField, kind: SchemeKind, t: f64, exps: &[i32]) -> Vec<f64> {
    let sols: Vec<SpectralField> = exps.iter().map(|e| run(model, u, t, kind, 2f64.powi(-e))).collect();
    let errs: Vec<f64> = sols.windows(2).map(|w| w[0].distance(&w[1]).unwrap()).collect();
    errs.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}

#[test]
fn integrator_orders() {
    let g = make_grid(32.0, 256).unwrap();
    let u = profiles::sech(&g, 1.5, 0.0, 1.0);
    for s in richardson_slope(&ModelSpec::Quintic { lambda: 1.0 }, &u, SchemeKind::StrangExact, 0.25, &[6, 7, 8, 9]) {
        assert!((s - 2.0).abs() < 0.2, "strang slope {s}");
    }
    for s in richardson_slope(&ModelSpec::DTruncated { d: 16 }, &u, SchemeKind::LawsonRk4, 0.25, &[5, 6, 7, 8]) {
        assert!((s - 4.0).abs() < 0.4, "lawson slope {s}");
    }
}

#[test]
fn reversibility() {
    let g = make_grid(32.0, 256).unwrap();
    let u = profiles::sech(&g, 1.5, 0.0, 1.0);
    let q = ModelSpec::Quintic { lambda: 1.0 };
    let s = |k, dt| StepScheme::new(k, dt).unwrap();
    assert!(reverse_check(&ModelSpec::Free, &u, 1.0, &s(SchemeKind::LawsonRk4, 0.01)).unwrap() < 1e-12);
    // Strang with exact substeps is symmetric: reversal is exact up to roundoff.
    assert!(reverse_check(&q, &u, 0.5, &s(SchemeKind::StrangExact, 1.0 / 64.0)).unwrap() < 1e-11);
    let tt = ModelSpec::TorusTruncated { n_cut: 8, d: 16, k: 0.5 };
    let a = reverse_check(&tt, &u, 0.5, &s(SchemeKind::LawsonRk4, 1.0 / 32.0)).unwrap();
    let b = reverse_check(&tt, &u, 0.5, &s(SchemeKind::LawsonRk4, 1.0 / 64.0)).unwrap();
    // The bound is C dt^4; the leading odd error terms of a step and its
    // reverse cancel, so the observed shrink is closer to 32x.
    assert!(a / b > 12.0, "{a:.3e} / {b:.3e}");
}

#[test]
fn torus_truncation_keeps_its_subspace() {
    let g = make_grid(32.0, 512).unwrap();
    let tt = ModelSpec::TorusTruncated { n_cut: 4, d: 2, k: 1.0 };
    let u = apply_multiplier(&profiles::sech(&g, 1.5, 0.0, 0.5), &MultiplierSymbol::SharpLow(4.0));
    assert!(tt.subspace_leak(&u) < 1e-28);
    let tr = evolve(&tt, &u, 0.5, &StepScheme::new(SchemeKind::LawsonRk4, 1.0 / 1024.0).unwrap(), 128).unwrap();
    for s in tr.snapshots() {
        assert!(tt.subspace_leak(s) < 1e-26 * u.mass());
    }
    assert!(tr.mass_drift() < 1e-9);
}

#[test]
fn gauge_invariance() {
    let g = make_grid(32.0, 256).unwrap();
    let u = profiles::sech(&g, 1.2, 0.5, 1.0);
    let rot = Complex64::from_polar(1.0, 0.9);
    let models = [ModelSpec::Quintic { lambda: 1.0 }, ModelSpec::DTruncated { d: 4 }];
    for m in &models {
        let kind = SchemeKind::for_model(m);
        let a = run(m, &u.scaled(rot), 0.25, kind, 1.0 / 256.0);
        let b = run(m, &u, 0.25, kind, 1.0 / 256.0).scaled(rot);
        assert!(a.distance(&b).unwrap() < 1e-13, "{}", m.name());
    }
}

#[test]
fn lattice_galilei_boost() {
    // 4 pi b T must be a whole number of nodes: b = 3/32, T = 1/pi, shift = 6 dx.
    let g = make_grid(32.0, 512).unwrap();
    let b = 3.0 / 32.0;
    let t = 1.0 / PI;
    let q = ModelSpec::Quintic { lambda: 1.0 };
    let u = profiles::sech(&g, 1.0, 0.0, 1.0);
    let boosted = apply_g(&SymmetryFrame::new(1.0, b, 0.0, 0.0), &u).unwrap();
    let dt = t / 1024.0;
    let lhs = run(&q, &boosted, t, SchemeKind::StrangExact, dt);
    let mut frame = SymmetryFrame::new(1.0, b, 4.0 * PI * b * t, 0.0);
    frame.gauge = -4.0 * PI * PI * b * b * t;
    assert!((frame.translation / g.dx() - 6.0).abs() < 1e-12);
    let rhs = apply_g(&frame, &run(&q, &u, t, SchemeKind::StrangExact, dt)).unwrap();
    let err = lhs.distance(&rhs).unwrap();
    assert!(err < 1e-8, "{err:.3e}");
}

#[test]
fn dyadic_scaling() {
    // u_lam(t, x) = lam^{-1/2} u(t / lam^2, x / lam) with lam = 2: same node count, doubled length.
    let small = make_grid(16.0, 256).unwrap();
    let big = make_grid(32.0, 256).unwrap();
    let q = ModelSpec::Quintic { lambda: 1.0 };
    let u = profiles::sech(&small, 1.3, 0.0, 1.0);
    let v = profiles::sech(&big, 1.3 / 2f64.sqrt(), 0.0, 2.0);
    let a = run(&q, &u, 0.25, SchemeKind::StrangExact, 1.0 / 512.0).samples();
    let b = run(&q, &v, 1.0, SchemeKind::StrangExact, 4.0 / 512.0).samples();
    let dev = a.iter().zip(&b).map(|(x, y)| (x - y * 2f64.sqrt()).norm()).fold(0.0, f64::max);
    assert!(dev < 1e-8, "{dev:.3e}");
}

#[test]
fn alpha_truncation_with_identity_is_rescaled_quintic() {
    let g = make_grid(32.0, 256).unwrap();
    let alpha: f64 = 0.5;
    let u = profiles::sech(&g, 1.0, 0.0, 1.0);
    let am = ModelSpec::AlphaTruncated { alpha, symbol: MultiplierSymbol::Identity };
    let a = run(&am, &u, 0.5, SchemeKind::StrangExact, 1.0 / 256.0);
    let b = run(&ModelSpec::Quintic { lambda: 1.0 }, &u.scaled(c(alpha.powf(1.5))), 0.5, SchemeKind::StrangExact, 1.0 / 256.0)
        .scaled(c(alpha.powf(-1.5)));
    assert!(a.distance(&b).unwrap() < 1e-10);
}

#[test]
fn model_validation() {
    assert!(ModelSpec::Quintic { lambda: 0.0 }.validate().is_err());
    assert!(ModelSpec::AlphaTruncated { alpha: 1.5, symbol: MultiplierSymbol::Identity }.validate().is_err());
    assert!(ModelSpec::DTruncated { d: 12 }.validate().is_err());
    assert!(ModelSpec::TorusTruncated { n_cut: 6, d: 2, k: 1.0 }.validate().is_err());
    assert!(ModelSpec::Inhomogeneous { h: HSpec::OnePlusCos, n: 0, lambda: 1.0 }.validate().is_err());
    assert!(ModelSpec::Inhomogeneous { h: HSpec::Samples(vec![]), n: 1, lambda: 1.0 }.validate().is_err());
    let h = HSpec::Samples(vec![2.0, 1.0, 0.0, 1.0]);
    assert!((h.eval(0.0) - 2.0).abs() < 1e-14 && (h.eval(0.5) - 0.0).abs() < 1e-14);
    assert!((h.eval(0.125) - (1.0 + (PI / 4.0).cos())).abs() < 1e-14);
    assert_eq!(h.mean(), 1.0);
}

#[test]
fn energy_of_inhomogeneous_constant_field() {
    let g = make_grid(1.0, 64).unwrap();
    let u = SpectralField::from_fn(&g, |_| c(0.9));
    let m = ModelSpec::Inhomogeneous { h: HSpec::OnePlusCos, n: 2, lambda: 3.0 };
    // integral of (1 + cos(4 pi x)) over one period is 1.
    assert!((energy(&u, &m) - 3.0 / 6.0 * 0.9f64.powi(6)).abs() < 1e-13);
}

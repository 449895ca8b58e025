use std::f64::consts::PI;

use nlslab_core::profiles;
use nlslab_core::propagators::linear_flow;
use nlslab_core::seed::SeedStream;
use nlslab_core::spectral_core::{apply_multiplier, make_grid, MultiplierSymbol, SpectralField};
use nlslab_core::symmetries::{
    apply_G, apply_g, apply_t, build_cutoffs, orthogonality_defect, periodic_extension, pull_back, push_forward,
    CutoffParams, FreeSampler, SymmetryFrame, TrajectorySampler, CUTOFF_LEVELS,
};
use nlslab_core::{Complex64, Error};
use rand::Rng;

fn random_band_limited(seed: u64, grid: &nlslab_core::spectral_core::TorusGrid, band: f64) -> SpectralField {
    let mut rng = SeedStream::new(seed).rng(0);
    let coeffs: Vec<Complex64> = (0..grid.points())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let f = SpectralField::from_coefficients(grid, coeffs).unwrap();
    apply_multiplier(&f, &MultiplierSymbol::SharpLow(band))
}

#[test]
fn apply_g_examples() {
    let g = make_grid(8.0, 64).unwrap();
    let u = random_band_limited(3, &g, 2.0);
    assert!(apply_g(&SymmetryFrame::identity(), &u).unwrap().distance(&u).unwrap() < 1e-15);

    let m = SpectralField::mode(&g, 2, Complex64::new(1.0, 0.0)).unwrap();
    let v = apply_g(&SymmetryFrame::new(1.0, 5.0 / 8.0, 0.0, 0.0), &m).unwrap();
    assert!((v.coefficient(7) - 1.0).norm() < 1e-15);
    assert!((v.mass() - m.mass()).abs() < 1e-14);

    let frame = SymmetryFrame::new(1.0, -0.375, 2.5, 0.0);
    let w = apply_g(&frame, &u).unwrap();
    assert!((w.mass() - u.mass()).abs() < 1e-10 * u.mass());
    // Translation by 2.5 = 20 nodes: samples move by 20 places.
    let (su, sw) = (u.samples(), w.samples());
    for j in 0..64 {
        let x = g.node(j);
        let want = su[(j + 64 - 20) % 64] * Complex64::from_polar(1.0, 2.0 * PI * -0.375 * x);
        assert!((sw[j] - want).norm() < 1e-13);
    }
    assert!(apply_g(&SymmetryFrame::new(3.0, 0.0, 0.0, 0.0), &u).is_err());
}

#[test]
fn dyadic_scale_matches_definition_on_localized_data() {
    let g = make_grid(64.0, 1024).unwrap();
    let u = profiles::gaussian(&g, 1.0, 0.0, 1.5, 0.0);
    let v = apply_g(&SymmetryFrame::new(2.0, 0.0, 0.0, 0.0), &u).unwrap();
    let want = profiles::gaussian(&g, 2f64.powf(-0.5), 0.0, 3.0, 0.0);
    assert!(v.distance(&want).unwrap() < 1e-10);
    let back = apply_g(&SymmetryFrame::new(0.5, 0.0, 0.0, 0.0), &v).unwrap();
    assert!(back.distance(&u).unwrap() < 1e-10);
}

#[test]
fn big_g_reductions() {
    let g = make_grid(16.0, 128).unwrap();
    let u = random_band_limited(11, &g, 1.5);
    let f = SymmetryFrame::new(1.0, 0.25, -1.0, 0.0);
    assert!(apply_G(&f, &u).unwrap().distance(&apply_g(&f, &u).unwrap()).unwrap() < 1e-15);
    let t = SymmetryFrame::new(1.0, 0.0, 0.0, 0.7);
    assert!(apply_G(&t, &u).unwrap().distance(&linear_flow(&u, 0.7)).unwrap() < 1e-15);
}

#[test]
fn trajectory_operator_intertwines_free_flow() {
    let g = make_grid(16.0, 128).unwrap();
    let u = random_band_limited(7, &g, 1.5);
    let frames = [SymmetryFrame::new(1.0, 0.25, 1.5, 0.3), SymmetryFrame::new(1.0, -0.5, -2.0, -0.8)];
    for frame in frames {
        let gu = apply_G(&frame, &u).unwrap();
        let rhs = apply_t(&frame, FreeSampler::new(u.clone()));
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let t = -1.0 + 0.1 * i as f64;
            let lhs = linear_flow(&gu, t).samples();
            for (j, x) in g.nodes().iter().enumerate().step_by(4) {
                worst = worst.max((lhs[j] - rhs.sample(t, *x)).norm());
            }
        }
        assert!(worst < 1e-8, "{worst:.3e}");
    }
}

#[test]
fn frame_inverse_round_trip() {
    // 4 pi b t = 6 dx keeps the inverse translation on the lattice.
    let g = make_grid(32.0, 512).unwrap();
    let u = random_band_limited(5, &g, 2.0);
    let mut f = SymmetryFrame::new(1.0, 3.0 / 32.0, 1.25, 1.0 / PI);
    f.gauge = 0.4;
    let inv = f.inverse();
    let lf = inv.on_grid(&g).unwrap();
    assert!(lf.translation_residual.abs() < 1e-12 && lf.boost_residual.abs() < 1e-12);
    let there = apply_G(&f, &u).unwrap();
    assert!(apply_G(&inv, &there).unwrap().distance(&u).unwrap() < 1e-10);
    assert!(apply_G(&f, &apply_G(&inv, &u).unwrap()).unwrap().distance(&u).unwrap() < 1e-10);
}

#[test]
fn orthogonality_examples_and_symmetry() {
    let id = SymmetryFrame::identity();
    assert_eq!(orthogonality_defect(&id, &id), 2.0);
    assert_eq!(orthogonality_defect(&id, &SymmetryFrame::new(4.0, 0.0, 0.0, 0.0)), 4.25);
    for d in [0.5, 3.0, 10.0] {
        let moved = SymmetryFrame::new(1.0, 0.0, d, 0.0);
        assert!((orthogonality_defect(&id, &moved) - (2.0 + d * d)).abs() < 1e-12);
    }
    let mut rng = SeedStream::new(21).rng(0);
    for _ in 0..200 {
        let mut frame = || {
            SymmetryFrame::new(
                2f64.powi(rng.random_range(-3..4)),
                rng.random_range(-2.0..2.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-1.0..1.0),
            )
        };
        let (a, mut b) = (frame(), frame());
        assert!(orthogonality_defect(&a, &b) >= 2.0);
        // The position term is symmetric once the boosts agree.
        b.boost = a.boost;
        let (ab, ba) = (orthogonality_defect(&a, &b), orthogonality_defect(&b, &a));
        assert!((ab - ba).abs() <= 1e-12 * ab, "{ab} vs {ba}");
    }
}

#[test]
fn cutoffs_on_compact_and_spread_data() {
    let g = make_grid(256.0, 2048).unwrap();
    let bump = SpectralField::from_fn(&g, |x| {
        let r = 1.0 - (x / 3.0).powi(2);
        Complex64::new(if r > 0.0 { r * r } else { 0.0 }, 0.0)
    });
    let p = CutoffParams { d: 2.0, k: 1.0, t: 0.25, eta: 0.5, eps: 1e-8 };
    let c = build_cutoffs(p, &bump).unwrap();
    let r = c.report();
    assert!(r.residuals.iter().all(|v| *v < 1e-14));
    assert!(r.max_slope <= 0.5 / (2.0 * 1.0 * 0.25));
    assert!(r.min_gap >= 2.0 * 0.25 / 0.5);
    for j in 0..CUTOFF_LEVELS {
        assert!(c.mask(j).iter().all(|v| (0.0..=1.0).contains(v)));
        if j > 0 {
            assert!(c.mask(j - 1).iter().zip(c.mask(j)).all(|(a, b)| *a == 0.0 || *b == 1.0));
        }
        let x = c.center() - 128.0;
        assert!((c.profile(j, x) - c.mask(j)[g.points() / 2 + (x / g.dx()).round() as usize]).abs() < 1e-12);
    }

    // A field spread over the whole period has no window of small mass.
    let flat = SpectralField::from_fn(&g, |_| Complex64::new(0.1, 0.0));
    assert!(matches!(build_cutoffs(p, &flat), Err(Error::NoLowMassWindow { .. })));
    let tiny = make_grid(4.0, 64).unwrap();
    assert!(build_cutoffs(p, &SpectralField::zeros(&tiny)).is_err());
}

#[test]
fn transfer_maps() {
    let torus = make_grid(16.0, 128).unwrap();
    let line = make_grid(64.0, 512).unwrap();
    let f = profiles::gaussian(&line, 1.0, 0.0, 1.0, 0.0);
    let t = push_forward(&f, &torus).unwrap();
    let rt = pull_back(&t, (-8.0, 8.0), &line).unwrap().distance(&f).unwrap();
    assert!(rt < 1e-12, "{rt:.3e}");

    let two = f.add(&profiles::gaussian(&line, 1.0, 16.0, 1.0, 0.0)).unwrap();
    let p = push_forward(&two, &torus).unwrap();
    assert!(p.distance(&t.scaled(Complex64::new(2.0, 0.0))).unwrap() < 1e-12);
    assert!(p.mass() <= 4.0 * f.mass() + 1e-12);

    // periodic_extension is the adjoint of push_forward.
    let h = random_band_limited(9, &torus, 2.0);
    let w = random_band_limited(10, &line, 2.0);
    let a = push_forward(&w, &torus).unwrap().inner(&h).unwrap();
    let b = w.inner(&periodic_extension(&h, &line).unwrap()).unwrap();
    assert!((a - b).norm() < 1e-12);

    assert!(push_forward(&f, &make_grid(16.0, 64).unwrap()).is_err());
}

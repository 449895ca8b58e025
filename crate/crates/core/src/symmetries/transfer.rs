use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::spectral_core::{synthesize, SpectralField, TorusGrid};

/// Checks that `line` is `m` periods of `torus` at identical spacing; returns `m`.
fn periods(line: &TorusGrid, torus: &TorusGrid) -> Result<usize> {
    let rel = (line.dx() - torus.dx()).abs() / torus.dx();
    if rel > 1e-12 || line.points() % torus.points() != 0 {
        return Err(Error::IncompatibleGrids(format!(
            "line grid (L={}, n={}) is not a whole number of periods of (L={}, n={}) at equal spacing",
            line.length(),
            line.points(),
            torus.length(),
            torus.points()
        )));
    }
    Ok(line.points() / torus.points())
}

fn torus_index(j: usize, line_points: usize, torus_points: usize) -> usize {
    let offset = (line_points - torus_points) / 2;
    (j + torus_points - offset % torus_points) % torus_points
}

/// `[p_* f](x) = sum over y ~ x of f(y)`: periodizes a line field onto the torus.
pub fn push_forward(line_field: &SpectralField, torus: &TorusGrid) -> Result<SpectralField> {
    let line = line_field.grid();
    periods(line, torus)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); torus.points()];
    for (j, v) in line_field.samples().into_iter().enumerate() {
        acc[torus_index(j, line.points(), torus.points())] += v;
    }
    synthesize(torus, &acc)
}

/// Periodic extension of a torus field over the whole line grid (the adjoint of `push_forward`).
pub fn periodic_extension(torus_field: &SpectralField, line: &TorusGrid) -> Result<SpectralField> {
    let torus = torus_field.grid();
    periods(line, torus)?;
    let s = torus_field.samples();
    let out: Vec<Complex64> =
        (0..line.points()).map(|j| s[torus_index(j, line.points(), torus.points())]).collect();
    synthesize(line, &out)
}

/// `p^* f`: the periodic extension restricted to `[a, b)`, zero elsewhere.
pub fn pull_back(torus_field: &SpectralField, window: (f64, f64), line: &TorusGrid) -> Result<SpectralField> {
    let torus = torus_field.grid();
    periods(line, torus)?;
    let (a, b) = window;
    if !(b > a) || b - a > torus.length() * (1.0 + 1e-12) {
        return Err(invalid("window", format!("[{a}, {b}) must be non-empty and at most one period long")));
    }
    let s = torus_field.samples();
    let out: Vec<Complex64> = line
        .nodes()
        .into_iter()
        .enumerate()
        .map(|(j, y)| {
            if y >= a && y < b {
                s[torus_index(j, line.points(), torus.points())]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    synthesize(line, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles;
    use crate::spectral_core::make_grid;

    #[test]
    fn node_alignment() {
        // Line node y_j must land on the torus node with the same coordinate mod L.
        let torus = make_grid(8.0, 16).unwrap();
        let line = make_grid(32.0, 64).unwrap();
        for j in 0..64 {
            let y = line.node(j);
            let i = torus_index(j, 64, 16);
            assert!((torus.wrap(y) - torus.node(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_within_one_period() {
        let torus = make_grid(32.0, 256).unwrap();
        let line = make_grid(64.0, 512).unwrap();
        let f = profiles::gaussian(&line, 1.0, 0.0, 1.5, 0.0);
        let t = push_forward(&f, &torus).unwrap();
        let back = pull_back(&t, (-16.0, 16.0), &line).unwrap();
        assert!(back.distance(&f).unwrap() < 1e-12);
    }

    #[test]
    fn copies_one_period_apart_add_up() {
        let torus = make_grid(32.0, 256).unwrap();
        let line = make_grid(64.0, 512).unwrap();
        let two = profiles::gaussian(&line, 1.0, -8.0, 1.0, 0.0)
            .add(&profiles::gaussian(&line, 1.0, 24.0, 1.0, 0.0))
            .unwrap();
        let one = profiles::gaussian(&torus, 1.0, -8.0, 1.0, 0.0);
        let p = push_forward(&two, &torus).unwrap();
        assert!(p.distance(&one.scaled(Complex64::new(2.0, 0.0))).unwrap() < 1e-12);
        assert!(p.mass() <= 4.0 * two.mass() + 1e-12);
    }

    #[test]
    fn spacing_mismatch_is_rejected() {
        let torus = make_grid(32.0, 256).unwrap();
        let line = make_grid(64.0, 256).unwrap();
        let f = SpectralField::zeros(&line);
        assert!(matches!(push_forward(&f, &torus), Err(Error::IncompatibleGrids(_))));
        let t = SpectralField::zeros(&torus);
        let ok = make_grid(64.0, 512).unwrap();
        assert!(pull_back(&t, (0.0, 40.0), &ok).is_err());
    }
}

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_padded: Arc<dyn Fft<f64>>,
    inverse_padded: Arc<dyn Fft<f64>>,
}

/// The circle `R / (L Z)` sampled at `points` centred nodes.
///
/// Cloning is cheap: FFT plans for `points` and for the 3x padded size are
/// shared behind an `Arc`.
#[derive(Clone)]
pub struct TorusGrid {
    length: f64,
    points: usize,
    plans: Arc<Plans>,
}

pub fn make_grid(length: f64, points: usize) -> Result<TorusGrid> {
    TorusGrid::new(length, points)
}

impl TorusGrid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::BadLength(length));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::BadPoints(points));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
            forward_padded: planner.plan_fft_forward(3 * points),
            inverse_padded: planner.plan_fft_inverse(3 * points),
        };
        Ok(Self { length, points, plans: Arc::new(plans) })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn padded_points(&self) -> usize {
        3 * self.points
    }

    /// Integer wavenumber stored at FFT-order index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 / self.length
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.frequency(i)).collect()
    }

    /// Largest resolved |xi| (the Nyquist frequency).
    pub fn max_frequency(&self) -> f64 {
        (self.points / 2) as f64 / self.length
    }

    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.points / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.points as i64) as usize)
        }
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    pub fn padded_nodes(&self) -> Vec<f64> {
        let m = self.padded_points();
        let h = self.length / m as f64;
        (0..m).map(|j| (j as f64 - (m / 2) as f64) * h).collect()
    }

    /// Representative of `x` in `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.length;
        let y = (x + 0.5 * l).rem_euclid(l) - 0.5 * l;
        if y >= 0.5 * l {
            y - l
        } else {
            y
        }
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.plans.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.plans.inverse.process(buf);
    }

    pub(crate) fn fft_forward_padded(&self, buf: &mut [Complex64]) {
        self.plans.forward_padded.process(buf);
    }

    pub(crate) fn fft_inverse_padded(&self, buf: &mut [Complex64]) {
        self.plans.inverse_padded.process(buf);
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.length == other.length
    }
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

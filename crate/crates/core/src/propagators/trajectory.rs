use super::model::ModelSpec;
use super::step::SchemeKind;
use crate::error::{invalid, Error, Result};
use crate::spectral_core::{SpectralField, TorusGrid};

/// How a trajectory was produced; absent for loaded or synthetic data.
#[derive(Clone, Debug, PartialEq)]
pub struct RunMeta {
    pub model: ModelSpec,
    pub scheme: SchemeKind,
    pub dt: f64,
}

/// Time-stamped snapshots on one grid, starting at `t = 0`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: TorusGrid,
    times: Vec<f64>,
    snapshots: Vec<SpectralField>,
    meta: Option<RunMeta>,
}

impl Trajectory {
    pub fn new(
        grid: &TorusGrid,
        times: Vec<f64>,
        snapshots: Vec<SpectralField>,
        meta: Option<RunMeta>,
    ) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(Error::LengthMismatch { expected: times.len(), got: snapshots.len() });
        }
        if times.is_empty() {
            return Err(invalid("times", "empty trajectory"));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("times", "must start at 0 and increase strictly"));
        }
        if snapshots.iter().any(|s| s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: grid.clone(), times, snapshots, meta })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[SpectralField] {
        &self.snapshots
    }

    pub fn meta(&self) -> Option<&RunMeta> {
        self.meta.as_ref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &SpectralField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.snapshots.last().expect("non-empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// Snapshot-wise map, keeping the time stamps.
    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Result<Self> {
        let snaps: Vec<SpectralField> = self.snapshots.iter().map(f).collect();
        let grid = snaps[0].grid().clone();
        Self::new(&grid, self.times.clone(), snaps, None)
    }

    /// `self - other`, sample by sample; time stamps must agree.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.times.len() != other.times.len()
            || self.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
        {
            return Err(invalid("times", "trajectories are sampled at different times"));
        }
        let snaps = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.grid, self.times.clone(), snaps, None)
    }

    /// Largest relative mass deviation from the initial snapshot.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.snapshots[0].mass();
        if m0 == 0.0 {
            return self.snapshots.iter().map(|s| s.mass()).fold(0.0, f64::max);
        }
        self.snapshots.iter().map(|s| (s.mass() - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// Largest relative energy deviation from the initial snapshot.
    pub fn energy_drift(&self, model: &ModelSpec) -> f64 {
        let e: Vec<f64> = self.snapshots.iter().map(|s| super::energy(s, model)).collect();
        let scale = e[0].abs().max(f64::MIN_POSITIVE);
        e.iter().map(|v| (v - e[0]).abs() / scale).fold(0.0, f64::max)
    }
}

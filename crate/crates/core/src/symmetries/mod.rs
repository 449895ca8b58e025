//! The symmetry group, the trajectory operator `T`, orthogonality of frames,
//! the five-level cutoff family and the line/torus transfer maps.

mod cutoff;
mod frame;
mod transfer;

pub use cutoff::{build_cutoffs, CutoffParams, CutoffReport, CutoffSet, CUTOFF_LEVELS};
pub use frame::{
    apply_g, apply_G, apply_t, orthogonality_defect, FreeSampler, LatticeFrame, SymmetryFrame,
    TrajectorySampler, TransformedSampler,
};
pub use transfer::{periodic_extension, pull_back, push_forward};

//! Grids, Fourier analysis and synthesis, multipliers and basic functionals.

mod field;
mod grid;
mod symbol;

pub use field::{analyze, synthesize, SpectralField};
pub use grid::{make_grid, TorusGrid};
pub use symbol::{apply_multiplier, bump, eval_md, smoothstep, MultiplierSymbol};

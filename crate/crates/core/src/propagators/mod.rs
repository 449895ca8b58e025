//! Model variants, nonlinear terms, energies and time integrators.

mod model;
mod step;
mod trajectory;

pub use model::{energy, mass, nonlinear_term, HSpec, ModelSpec, PhaseWeight};
pub use step::{
    evolve, evolve_auto, evolve_forced, linear_flow, quintic_phase_substep, reverse_check, step,
    SchemeKind, StepScheme, DEFAULT_DT_EXPONENT,
};
pub use trajectory::{RunMeta, Trajectory};

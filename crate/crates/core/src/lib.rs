//! Numerical laboratory for the one-dimensional mass-critical (quintic)
//! nonlinear Schrodinger equation `i u_t + u_xx = N(u)` on rescaled tori.
//!
//! Conventions used everywhere in the crate:
//!
//! * frequencies are `xi = k / L` in cycles per unit length, so the
//!   Laplacian is multiplication by `-4 pi^2 xi^2`;
//! * `u_hat_k = (1/L) * integral of u(x) exp(-2 pi i k x / L)`;
//! * nodes are centred, `x_j = (j - n/2) * L / n`, covering `[-L/2, L/2)`;
//! * spectral coefficients are stored in FFT order.

pub mod error;
pub mod estimates;
pub mod experiments;
pub mod profiles;
pub mod propagators;
pub mod seed;
pub mod selfcheck;
pub mod spectral_core;
pub mod symmetries;

pub use error::{Error, Result};
pub use num_complex::Complex64;

//! Space-time norms, the bilinear law, the rescaled-torus kernel, operator
//! norms and the homogenization functional.

mod bilinear;
mod homogenization;
mod kernel;
mod norms;
mod opnorm;

pub use bilinear::{bilinear_check, packet_pair_l3, Packet};
pub use homogenization::{homogenization_defect, homogenization_defect_derivative};
pub use kernel::{
    dispersive_kernel, kernel_dispersive_constant, kernel_on_period, oscillatory_sum_check, OscillatoryReport,
};
pub use norms::{spacetime_norm, strichartz_s, NormReport};
pub use opnorm::{dense_operator_norm, operator_norm_l2, OperatorSpec, DENSE_ORACLE_MAX_POINTS};

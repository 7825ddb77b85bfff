//! Rigged Hilbert space machinery for a one-dimensional rectangular barrier.

// `!(x > 0.0)` is the NaN-rejecting form used throughout for input checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod model;
pub mod quadrature;
pub mod scattering;
pub mod eigenbasis;
pub mod interpolant;
pub mod testspace;
pub mod transforms;
pub mod verify;

pub use error::{Error, QuadratureFailure, Result};
pub use model::{BarrierModel, Observable, WaveNumbers};
pub use scattering::{solve_matching, Channel, ScatteringSolution, SignLabel};

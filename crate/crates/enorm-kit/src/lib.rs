//! Energy-constrained operator norms, relative-boundedness characteristics and
//! energy-constrained distances between completely positive maps, computed on
//! finite-dimensional or truncated Hilbert spaces.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64` for ordinary use.

// `!(x > 0)` rejects NaN on purpose; index loops mirror the textbook kernels.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::assign_op_pattern
)]

pub mod channels;
pub mod enorms;
pub mod error;
pub mod gspace;
pub mod matcore;
pub mod oscillator;
mod parallel;
pub mod random;
pub mod report;
pub mod scalar;
pub mod tol;
pub mod transforms;
pub mod verify;

pub use channels::CPMap;
pub use enorms::ENormResult;
pub use error::{Error, Result};
pub use gspace::GeneratingOperator;
pub use matcore::ComplexMatrix;
pub use parallel::configure_threads;
pub use scalar::{Real, C};
pub use tol::Tolerances;

/// Double-precision complex matrix.
pub type Matrix = ComplexMatrix<f64>;
/// Single-precision complex matrix.
pub type Matrix32 = ComplexMatrix<f32>;
/// Double-precision complex scalar.
pub type C64 = C<f64>;

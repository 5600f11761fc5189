//! Analysis of inhomogeneous consensus processes: infinite left-products of
//! row-stochastic matrices with positive diagonals.
//!
//! The crate provides validated stochastic matrices and their accumulations,
//! zero-pattern algebra, the Gantmacher canonical form, stabilization-time
//! detection for subaccumulation patterns, spectral projections with
//! joint-spectral-radius bounds, an ergodicity-based convergence engine, and
//! generators for intercommunication-interval growth experiments.
//!
//! All numeric code is generic over the scalar type (f32 or f64) through the
//! [`Scalar`] trait; the aliases below fix the common concrete choices.

pub mod error;
pub mod gantmacher;
pub mod linalg;
pub mod matrix;
pub mod pattern;
pub mod scalar;
pub mod seq;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, OpinionVector, StochasticMatrix};
pub use matrix::{DEFAULT_EPS_C, DEFAULT_EPS_ROW, DEFAULT_EPS_Z};
pub use pattern::ZeroPattern;
pub use scalar::Scalar;
pub use seq::{backward_accumulate, forward_accumulate, ConstantSequence, ExplicitSequence, MatrixSource};

/// Double-precision stochastic matrix, the default for the CLI.
pub type StochasticMatrix64 = StochasticMatrix<f64>;
/// Single-precision stochastic matrix.
pub type StochasticMatrix32 = StochasticMatrix<f32>;
/// Double-precision dense matrix.
pub type DenseMatrix64 = DenseMatrix<f64>;
/// Double-precision opinion vector.
pub type OpinionVector64 = OpinionVector<f64>;

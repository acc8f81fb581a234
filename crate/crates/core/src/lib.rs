//! Semidefinite community detection for sparse stochastic block models.

pub mod audit;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod recovery;
pub mod rng;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision dense matrix.
pub type Matrix = linalg::Mat<f64>;
/// Double-precision symmetric matrix.
pub type SymMatrix = linalg::SymmetricMatrix<f64>;

//! Two-step two-dimensional minimal residual (TSTMR) iterations and the
//! machinery around them: sparse kernels, splittings, baseline solvers,
//! augmented systems for discrete ill-posed problems, and test problems.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`.

pub mod diagnostics;
pub mod error;
pub mod illposed;
pub mod linalg;
pub mod problems;
pub mod scalar;
pub mod solvers;
pub mod splittings;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SparseMatrixF64 = linalg::SparseMatrix<f64>;
pub type DenseMatrixF64 = linalg::DenseMatrix<f64>;
pub type VectorF64 = linalg::Vector<f64>;
pub type SolveReportF64 = solvers::SolveReport<f64>;
pub type SolveOptionsF64<'a> = solvers::SolveOptions<'a, f64>;
pub type SplittingPairF64<'a> = splittings::SplittingPair<'a, f64>;
pub type ProblemF64 = problems::Problem<f64>;

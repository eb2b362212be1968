//! Storage, products, factorizations and small eigen-solvers.

pub mod banded;
pub mod dense;
pub mod gram;
pub mod mmio;
pub mod operator;
pub mod sparse;
pub mod spectral;
pub mod vector;

pub use banded::BandedLu;
pub use dense::{dense_lu_solve, svd, sym_eigs_dense, DenseCholesky, DenseLu, DenseMatrix, Svd};
pub use gram::{gram2_solve, Gram2};
pub use operator::{residual, Identity, LinearOperator, NormalOperator, Shifted, SymmetricFn, Transposed};
pub use sparse::{split_hs, spmv, spmv_t, SparseMatrix};
pub use spectral::{lanczos_extreme, power_norm};
pub use vector::{add, axpy, dot, norm2, rel_diff, scale, sub, Vector};

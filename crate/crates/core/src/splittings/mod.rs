//! Splittings `A = M - N` and the sub-solvers that apply `M⁻¹`.

mod exact;
mod incomplete;
mod inner;

pub use exact::{exact_solver, DenseLuSolver, DiagonalSolver, ExactRealization};
pub use incomplete::{ic0, ict, ilu0, IncompleteFactor, IncompleteKind};
pub use inner::{make_inner_subsolver, InnerMethod, InnerSolver};

use crate::error::Result;
use crate::linalg::{split_hs, SparseMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubSolverMode {
    ExactDense,
    ExactBanded,
    ExactDiagonal,
    IncompleteFactor,
    InnerIterative,
}

impl SubSolverMode {
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            SubSolverMode::ExactDense | SubSolverMode::ExactBanded | SubSolverMode::ExactDiagonal
        )
    }
}

/// Approximates the action of `M⁻¹` for a splitting matrix `M`.
///
/// `apply_into` is deterministic: the same input yields the same output.
pub trait SubSolver<T: Scalar> {
    fn dim(&self) -> usize;
    fn mode(&self) -> SubSolverMode;
    fn apply_into(&self, r: &[T], out: &mut [T]);

    fn apply(&self, r: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.apply_into(r, &mut out);
        out
    }
}

impl<T: Scalar, S: SubSolver<T> + ?Sized> SubSolver<T> for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn mode(&self) -> SubSolverMode {
        (**self).mode()
    }
    fn apply_into(&self, r: &[T], out: &mut [T]) {
        (**self).apply_into(r, out)
    }
}

impl<T: Scalar, S: SubSolver<T> + ?Sized> SubSolver<T> for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn mode(&self) -> SubSolverMode {
        (**self).mode()
    }
    fn apply_into(&self, r: &[T], out: &mut [T]) {
        (**self).apply_into(r, out)
    }
}

/// The two splittings `A = M̃ - Ñ = M̂ - N̂` a two-step method alternates between.
pub struct SplittingPair<'a, T> {
    pub m_tilde: Box<dyn SubSolver<T> + 'a>,
    pub m_hat: Box<dyn SubSolver<T> + 'a>,
    pub description: String,
}

impl<'a, T: Scalar> SplittingPair<'a, T> {
    pub fn new(
        m_tilde: impl SubSolver<T> + 'a,
        m_hat: impl SubSolver<T> + 'a,
        description: impl Into<String>,
    ) -> Self {
        Self {
            m_tilde: Box::new(m_tilde),
            m_hat: Box::new(m_hat),
            description: description.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m_tilde.dim()
    }
}

impl<T> std::fmt::Debug for SplittingPair<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplittingPair")
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

/// Shift minimizing `‖(ηI + S)⁻¹‖‖H - ηI‖`: the midpoint of the spectrum of `H(A)`.
pub fn eta_star<T: Scalar>(lam_min: T, lam_max: T) -> T {
    (lam_max + lam_min) * T::lit(0.5)
}

/// Explicit splitting matrices of the common `(αI + H, ηI + S)` family.
#[derive(Debug, Clone)]
pub struct SplittingMatrices<T> {
    pub m_tilde: SparseMatrix<T>,
    pub m_hat: SparseMatrix<T>,
}

impl<T: Scalar> SplittingMatrices<T> {
    /// `M̃ = αI + H(A)`, `M̂ = ηI + S(A)`.
    pub fn shifted_hs(a: &SparseMatrix<T>, alpha: T, eta: T) -> Result<Self> {
        let (h, s) = split_hs(a)?;
        Ok(Self {
            m_tilde: h.shift_diagonal(alpha)?,
            m_hat: s.shift_diagonal(eta)?,
        })
    }

    /// Factors both matrices exactly.
    pub fn exact_pair<'a>(&self, how: ExactRealization, description: &str) -> Result<SplittingPair<'a, T>> {
        Ok(SplittingPair {
            m_tilde: exact_solver(&self.m_tilde, how)?,
            m_hat: exact_solver(&self.m_hat, how)?,
            description: description.to_string(),
        })
    }
}

/// MRHSS / HSS splittings `(αI + H(A), αI + S(A))`, factored exactly.
pub fn hss_pair<'a, T: Scalar>(
    a: &SparseMatrix<T>,
    alpha: T,
    how: ExactRealization,
) -> Result<SplittingPair<'a, T>> {
    SplittingMatrices::shifted_hs(a, alpha, alpha)?
        .exact_pair(how, &format!("HSS alpha={}", alpha.as_f64()))
}

/// `M̃ = H(A)`, `M̂ = η I + S(A)`, factored exactly.
pub fn symmetric_shifted_skew_pair<'a, T: Scalar>(
    a: &SparseMatrix<T>,
    eta: T,
    how: ExactRealization,
) -> Result<SplittingPair<'a, T>> {
    SplittingMatrices::shifted_hs(a, T::zero(), eta)?
        .exact_pair(how, &format!("H(A) / {}I+S(A)", eta.as_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{lanczos_extreme, sym_eigs_dense, DenseMatrix};

    #[test]
    fn eta_star_examples() {
        assert_eq!(eta_star(0.0, 2.0), 1.0);
        assert_eq!(eta_star(1.0, 1.0), 1.0);
    }

    #[test]
    fn eta_star_minimizes_norm_product_on_grid() {
        // H with a symmetric spectrum about its midpoint, S a fixed skew block
        let h = DenseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let mut s = DenseMatrix::zeros(5, 5);
        for (i, j, v) in [(0, 1, 0.7), (1, 3, -0.4), (2, 4, 1.1), (0, 4, 0.3)] {
            s[(i, j)] = v;
            s[(j, i)] = -v;
        }
        let eig = sym_eigs_dense(&h).unwrap();
        let eta = eta_star(eig[0], eig[4]);
        let product = |eta: f64| {
            let shifted = s.add_scaled(1.0, &DenseMatrix::identity(5), eta).unwrap();
            let inv = shifted.inverse().unwrap();
            let hm = h.add_scaled(1.0, &DenseMatrix::identity(5), -eta).unwrap();
            let n1 = sym_eigs_dense(&inv.transpose().matmul(&inv).unwrap()).unwrap()[4].sqrt();
            let n2 = sym_eigs_dense(&hm.transpose().matmul(&hm).unwrap()).unwrap()[4].sqrt();
            n1 * n2
        };
        let step = 0.05;
        let best = (-20..=20)
            .map(|k| eta + k as f64 * step)
            .min_by(|a, b| product(*a).partial_cmp(&product(*b)).unwrap())
            .unwrap();
        assert!((best - eta).abs() <= step + 1e-12, "grid minimizer {best} vs eta* {eta}");
    }

    #[test]
    fn eta_star_from_lanczos_matches_dense() {
        let p = crate::problems::convdiff2d::<f64>(16, crate::problems::ConvDiffCase::I).unwrap();
        let (h, _) = split_hs(&p.matrix).unwrap();
        let (lo, hi) = lanczos_extreme(&h, h.nrows(), 5);
        let e = sym_eigs_dense(&h.to_dense()).unwrap();
        let dense_mid = eta_star(e[0], *e.last().unwrap());
        assert!((eta_star(lo, hi) - dense_mid).abs() < 1e-8);
    }
}

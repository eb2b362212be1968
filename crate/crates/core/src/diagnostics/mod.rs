//! Checks binding convergence theory to actual runs.

use crate::linalg::{power_norm, DenseMatrix};
use crate::scalar::Scalar;
use crate::solvers::SolveReport;

pub use crate::solvers::{contraction_constants, residual_bound_factor, ContractionConstants};

/// Sufficient condition for guaranteed residual decrease of a two-step
/// minimal residual method: `‖M̃⁻¹Ñ‖ < 1` or `‖M̂⁻¹N̂‖ < 1`.
///
/// Takes the iteration matrices `M̃⁻¹Ñ` and `M̂⁻¹N̂`; norms are estimated by
/// 200 power iterations.
pub fn check_splitting_contraction<T: Scalar>(tilde_iter: &DenseMatrix<T>, hat_iter: &DenseMatrix<T>) -> bool {
    let bound = T::one() - T::rel_tol(1e-10);
    power_norm(tilde_iter, 200) < bound || power_norm(hat_iter, 200) < bound
}

/// Iteration matrix `M⁻¹N = I - M⁻¹A` of the splitting `A = M - N`.
pub fn iteration_matrix<T: Scalar>(a: &DenseMatrix<T>, m: &DenseMatrix<T>) -> crate::Result<DenseMatrix<T>> {
    let minv_a = m.inverse()?.matmul(a)?;
    DenseMatrix::identity(a.nrows()).add_scaled(T::one(), &minv_a, -T::one())
}

/// Whether `‖r⁰‖, ‖r^½‖, ‖r¹‖, ‖r^{3/2}‖, …` is non-increasing, with strict
/// decrease between consecutive full steps. Comparisons allow a relative
/// slack of 1e-14.
pub fn validate_monotone_chain<T: Scalar>(report: &SolveReport<T>) -> bool {
    let slack = T::one() + T::rel_tol(1e-14);
    let full = &report.residuals;
    let half = &report.half_step_residuals;
    let mut prev = match full.first() {
        Some(&r) => r,
        None => return true,
    };
    for (k, &next_full) in full.iter().enumerate().skip(1) {
        let prev_full = full[k - 1];
        if let Some(&h) = half.get(k - 1) {
            if h > prev * slack {
                return false;
            }
            prev = h;
        }
        if next_full > prev * slack {
            return false;
        }
        if !(next_full < prev_full) && next_full > T::zero() {
            return false;
        }
        prev = next_full;
    }
    true
}

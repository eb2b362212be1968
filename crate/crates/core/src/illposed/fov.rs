use crate::error::{Error, Result};
use crate::linalg::{sym_eigs_dense, DenseMatrix};
use crate::scalar::Scalar;

/// Enclosure of the field of values of `K (Ω + S(K))⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FovInterval<T> {
    pub real_lo: T,
    pub real_hi: T,
    pub imag_half_width: T,
    /// `η̄ = (γ - μ²) / (2√γ)`.
    pub eta_bar: T,
}

impl<T: Scalar> FovInterval<T> {
    pub fn contains_real(&self, lo: T, hi: T, slack: T) -> bool {
        lo >= self.real_lo - slack && hi <= self.real_hi + slack
    }
}

/// Real and imaginary enclosures for `γ > μ²`; `lam_min_ata` is
/// `λ_min(AᵀA)` (zero is always safe).
pub fn fov_bound_interval<T: Scalar>(mu: T, gamma: T, lam_min_ata: T) -> Result<FovInterval<T>> {
    let mu2 = mu * mu;
    if !(gamma > mu2) {
        return Err(Error::InvalidParameter(format!("need gamma > mu^2 (gamma {gamma}, mu^2 {mu2})")));
    }
    if !(lam_min_ata >= T::zero()) {
        return Err(Error::InvalidParameter(format!("lambda_min(A^T A) must be >= 0, got {lam_min_ata}")));
    }
    let sg = gamma.sqrt();
    let two = T::lit(2.0);
    let eta_bar = (gamma - mu2) / (two * sg);
    Ok(FovInterval {
        real_lo: (mu2 + lam_min_ata) / (gamma + lam_min_ata) - eta_bar,
        real_hi: T::one() + eta_bar,
        imag_half_width: T::one() / (two * sg),
        eta_bar,
    })
}

/// `0 < γ - μ² < 2√γ (μ² + λ) / (γ + λ)`: the lower real bound is positive.
pub fn check_gamma_condition<T: Scalar>(mu: T, gamma: T, lam_min_ata: T) -> bool {
    let mu2 = mu * mu;
    let eps = gamma - mu2;
    if !(eps > T::zero()) || !(gamma + lam_min_ata > T::zero()) {
        return false;
    }
    eps < T::lit(2.0) * gamma.sqrt() * (mu2 + lam_min_ata) / (gamma + lam_min_ata)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaStar<T> {
    pub value: T,
    /// `μ = 0`: the admissible interval is empty.
    pub degenerate: bool,
}

/// Positive root of `√γ (γ - μ²) = 2μ²`, by bisection.
pub fn gamma_star<T: Scalar>(mu: T) -> GammaStar<T> {
    let mu2 = mu * mu;
    if mu2 == T::zero() {
        return GammaStar {
            value: T::zero(),
            degenerate: true,
        };
    }
    let two = T::lit(2.0);
    let f = |g: T| g.sqrt() * (g - mu2) - two * mu2;
    let (mut lo, mut hi) = (mu2, mu2 + two + two * mu2);
    let tol = T::lit(1e-12).max(T::epsilon() * hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * T::lit(0.5);
        if f(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    GammaStar {
        value: (lo + hi) * T::lit(0.5),
        degenerate: false,
    }
}

/// Extremes of the real part of the field of values of `K M̂⁻¹`, i.e. the
/// extreme eigenvalues of its symmetric part.
pub fn fov_numeric_real_extremes<T: Scalar>(k: &DenseMatrix<T>, m_hat: &DenseMatrix<T>) -> Result<(T, T)> {
    let p = k.matmul(&m_hat.inverse()?)?;
    let e = sym_eigs_dense(&p.symmetric_part()?)?;
    Ok((e[0], e[e.len() - 1]))
}

/// Largest `|Im z|` over the field of values of `K M̂⁻¹`: the spectral radius
/// of its skew-symmetric part.
pub fn fov_numeric_imag_extent<T: Scalar>(k: &DenseMatrix<T>, m_hat: &DenseMatrix<T>) -> Result<T> {
    let p = k.matmul(&m_hat.inverse()?)?;
    let s = p.skew_part()?;
    let e = sym_eigs_dense(&s.transpose().matmul(&s)?)?;
    Ok(e[e.len() - 1].max(T::zero()).sqrt())
}

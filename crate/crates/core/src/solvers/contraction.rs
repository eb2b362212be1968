use crate::error::{check_len, Result};
use crate::linalg::{norm2, sub, sym_eigs_dense, DenseMatrix};
use crate::scalar::Scalar;

/// Constants entering the per-step residual contraction factor of a
/// two-step minimal residual method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionConstants<T> {
    /// `min |⟨AM̃⁻¹y, y⟩| / ⟨y, y⟩`; zero when the field of values straddles 0.
    pub xi_tilde: T,
    pub xi_hat: T,
    /// `‖AM̃⁻¹‖₂`.
    pub norm_tilde: T,
    pub norm_hat: T,
}

impl<T: Scalar> ContractionConstants<T> {
    /// Whether `0 ∉ F(AM̃⁻¹) ∩ F(AM̂⁻¹)` (real symmetric-part test).
    pub fn guarantees_decrease(&self) -> bool {
        self.xi_tilde > T::zero() || self.xi_hat > T::zero()
    }
}

fn xi_and_norm<T: Scalar>(a: &DenseMatrix<T>, m: &DenseMatrix<T>) -> Result<(T, T)> {
    let p = a.matmul(&m.inverse()?)?;
    let eig = sym_eigs_dense(&p.symmetric_part()?)?;
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    let xi = if lo > T::zero() {
        lo
    } else if hi < T::zero() {
        -hi
    } else {
        T::zero()
    };
    let gram = p.transpose().matmul(&p)?;
    let top = *sym_eigs_dense(&gram)?.last().unwrap_or(&T::zero());
    Ok((xi, top.max(T::zero()).sqrt()))
}

/// Dense evaluation of the contraction constants. Intended for small
/// diagnostic problems.
pub fn contraction_constants<T: Scalar>(
    a: &DenseMatrix<T>,
    m_tilde: &DenseMatrix<T>,
    m_hat: &DenseMatrix<T>,
) -> Result<ContractionConstants<T>> {
    a.require_square()?;
    check_len(a.nrows(), m_tilde.nrows())?;
    check_len(a.nrows(), m_hat.nrows())?;
    let (xi_tilde, norm_tilde) = xi_and_norm(a, m_tilde)?;
    let (xi_hat, norm_hat) = xi_and_norm(a, m_hat)?;
    Ok(ContractionConstants {
        xi_tilde,
        xi_hat,
        norm_tilde,
        norm_hat,
    })
}

fn half_factor<T: Scalar>(xi: T, norm: T, r: &[T], r_prev: Option<&[T]>) -> T {
    let rr = norm2(r).powi(2);
    if rr == T::zero() || norm == T::zero() {
        return T::one();
    }
    let dd = r_prev.map_or(T::zero(), |p| norm2(&sub(r, p)).powi(2));
    let l = xi * xi * rr / (rr + dd);
    (T::one() - l / (norm * norm)).max(T::zero()).sqrt()
}

/// `L_k` with `‖r^{(k+1)}‖ ≤ L_k ‖r^{(k)}‖`, from the residuals entering the
/// two half-steps of step `k` and of step `k - 1` (absent at the first step).
pub fn residual_bound_factor<T: Scalar>(
    c: &ContractionConstants<T>,
    r_k: &[T],
    r_km1: Option<&[T]>,
    r_half: &[T],
    r_half_prev: Option<&[T]>,
) -> T {
    half_factor(c.xi_tilde, c.norm_tilde, r_k, r_km1) * half_factor(c.xi_hat, c.norm_hat, r_half, r_half_prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_splitting_gives_unit_constants() {
        let a = DenseMatrix::<f64>::from_rows(&[&[3.0, 1.0], &[-1.0, 2.0]]).unwrap();
        let c = contraction_constants(&a, &a, &a).unwrap();
        assert!((c.xi_tilde - 1.0).abs() < 1e-12);
        assert!((c.norm_tilde - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indefinite_symmetric_part_gives_zero() {
        let a = DenseMatrix::diagonal(&[1.0, -1.0]);
        let c = contraction_constants(&a, &DenseMatrix::identity(2), &DenseMatrix::identity(2)).unwrap();
        assert_eq!(c.xi_tilde, 0.0);
        assert!(!c.guarantees_decrease());
    }

    #[test]
    fn spd_with_symmetric_part_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = DenseMatrix::from_fn(5, 5, |_, _| rng.random::<f64>() - 0.5);
        let a = b.transpose().matmul(&b).unwrap().add_scaled(1.0, &DenseMatrix::identity(5), 1.0).unwrap();
        let h = a.symmetric_part().unwrap();
        let c = contraction_constants(&a, &h, &h).unwrap();
        let p = a.matmul(&h.inverse().unwrap()).unwrap();
        let e = sym_eigs_dense(&p.symmetric_part().unwrap()).unwrap();
        assert!((c.xi_tilde - e[0]).abs() < 1e-12);
    }
}

//! The 2×2 Gram system that fixes the two step lengths of a
//! two-dimensional residual minimization.

use crate::linalg::vector::dot;
use crate::scalar::Scalar;

/// Relative determinant threshold below which a Gram system is treated as singular.
pub const GRAM_SINGULAR_TOL: f64 = 1e-14;

/// Symmetric 2×2 system `[[m11, m12], [m12, m22]] β = rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gram2<T> {
    pub m11: T,
    pub m12: T,
    pub m22: T,
    pub rhs1: T,
    pub rhs2: T,
}

impl<T: Scalar> Gram2<T> {
    /// Gram system for minimizing `‖r - β₁ w₁ - β₂ w₂‖` where `w_i = A δ_i`.
    pub fn from_mapped(w1: &[T], w2: &[T], r: &[T]) -> Self {
        Self {
            m11: dot(w1, w1),
            m12: dot(w1, w2),
            m22: dot(w2, w2),
            rhs1: dot(r, w1),
            rhs2: dot(r, w2),
        }
    }

    pub fn determinant(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn is_singular(&self) -> bool {
        self.determinant() <= T::rel_tol(GRAM_SINGULAR_TOL) * self.m11 * self.m22
    }
}

/// Solves the Gram system by explicit 2×2 inversion; `None` when singular.
pub fn gram2_solve<T: Scalar>(g: &Gram2<T>) -> Option<(T, T)> {
    if g.is_singular() {
        return None;
    }
    let det = g.determinant();
    let b1 = (g.m22 * g.rhs1 - g.m12 * g.rhs2) / det;
    let b2 = (g.m11 * g.rhs2 - g.m12 * g.rhs1) / det;
    Some((b1, b2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diagonal_gram() {
        let g = Gram2 {
            m11: 4.0,
            m12: 0.0,
            m22: 9.0,
            rhs1: 8.0,
            rhs2: 18.0,
        };
        assert_eq!(gram2_solve(&g), Some((2.0, 2.0)));
    }

    #[test]
    fn proportional_columns_are_singular() {
        let w1 = [1.0, -2.0, 0.5];
        let w2: Vec<f64> = w1.iter().map(|v| 2.0 * v).collect();
        let g = Gram2::from_mapped(&w1, &w2, &[1.0, 1.0, 1.0]);
        assert!(gram2_solve(&g).is_none());
        let zero = Gram2::from_mapped(&w1, &[0.0; 3], &[1.0; 3]);
        assert!(gram2_solve(&zero).is_none());
    }

    #[test]
    fn hand_solve() {
        let g = Gram2 {
            m11: 2.0,
            m12: 1.0,
            m22: 2.0,
            rhs1: 3.0,
            rhs2: 3.0,
        };
        let (b1, b2): (f64, f64) = gram2_solve(&g).unwrap();
        assert!((b1 - 1.0).abs() < 1e-15 && (b2 - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn solution_has_small_residual(
            w1 in prop::collection::vec(-10.0f64..10.0, 4),
            w2 in prop::collection::vec(-10.0f64..10.0, 4),
            r in prop::collection::vec(-10.0f64..10.0, 4),
        ) {
            let g = Gram2::from_mapped(&w1, &w2, &r);
            if let Some((b1, b2)) = gram2_solve(&g) {
                let e1 = g.m11 * b1 + g.m12 * b2 - g.rhs1;
                let e2 = g.m12 * b1 + g.m22 * b2 - g.rhs2;
                let scale = (g.m11.abs() + g.m12.abs()) * b1.abs()
                    + (g.m12.abs() + g.m22.abs()) * b2.abs()
                    + g.rhs1.abs() + g.rhs2.abs();
                prop_assert!((e1 * e1 + e2 * e2).sqrt() <= 1e-10 * scale.max(1e-300));
            }
        }
    }
}

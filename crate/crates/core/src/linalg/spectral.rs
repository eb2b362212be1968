//! Extreme eigenvalue and norm estimates for matrix-free operators.

use crate::linalg::dense::{sym_eigs_dense, DenseMatrix};
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector::{axpy, dot, norm2, scale};
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POWER_SEED: u64 = 0x5eed_0f_90_7e5;

fn random_unit<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
    let nv = norm2(&v);
    scale(T::one() / nv, &mut v);
    v
}

/// Smallest and largest Ritz values of `iters` Lanczos steps on a symmetric
/// operator, with full reorthogonalization against all previous vectors.
///
/// Stops early when the Krylov space is exhausted and returns the Ritz
/// extremes accumulated so far.
pub fn lanczos_extreme<T: Scalar, O: LinearOperator<T> + ?Sized>(
    op: &O,
    iters: usize,
    seed: u64,
) -> (T, T) {
    let n = op.nrows();
    assert!(op.is_square(), "lanczos needs a square operator");
    if n == 0 {
        return (T::zero(), T::zero());
    }
    let steps = iters.max(1).min(n);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(steps);
    let mut alphas: Vec<T> = Vec::with_capacity(steps);
    let mut betas: Vec<T> = Vec::with_capacity(steps);
    let mut q = random_unit::<T>(n, seed);
    let mut w = vec![T::zero(); n];
    for j in 0..steps {
        op.apply_into(&q, &mut w);
        let alpha = dot(&q, &w);
        axpy(-alpha, &q, &mut w);
        if let (Some(prev), Some(&beta)) = (basis.last(), betas.last()) {
            axpy(-beta, prev, &mut w);
        }
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt keep the basis orthonormal
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        alphas.push(alpha);
        let beta = norm2(&w);
        let anorm = alphas.iter().fold(T::zero(), |m, a| m.max(a.abs())) + beta;
        if j + 1 == steps || beta <= T::rel_tol(1e-13) * anorm.max(T::min_positive_value()) {
            break;
        }
        betas.push(beta);
        q = w.iter().map(|&v| v / beta).collect();
    }
    let k = alphas.len();
    let tri = DenseMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            T::zero()
        }
    });
    let ritz = sym_eigs_dense(&tri).expect("tridiagonal is symmetric");
    (ritz[0], ritz[k - 1])
}

/// Power iteration on `AᵀA`; returns `‖A v‖` for the final unit iterate,
/// a lower bound on the 2-norm.
pub fn power_norm<T: Scalar, O: LinearOperator<T> + ?Sized>(op: &O, iters: usize) -> T {
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return T::zero();
    }
    let mut v = random_unit::<T>(n, POWER_SEED);
    let mut av = vec![T::zero(); op.nrows()];
    let mut atav = vec![T::zero(); n];
    for _ in 0..iters.max(1) {
        op.apply_into(&v, &mut av);
        op.apply_transpose_into(&av, &mut atav);
        let nn = norm2(&atav);
        if nn == T::zero() {
            return T::zero();
        }
        v.iter_mut().zip(&atav).for_each(|(vi, &a)| *vi = a / nn);
    }
    op.apply_into(&v, &mut av);
    norm2(&av)
}

//! Banded LU with partial pivoting, the exact direct solver for splitting
//! matrices with lexicographic stencil structure.

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMatrix;
use crate::scalar::Scalar;

/// `P M = L U` for a matrix with lower bandwidth `kl` and upper bandwidth `ku`.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`, which leaves room for the
/// fill that row interchanges produce.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandedLu<T> {
    pub fn new(m: &SparseMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                nrows: m.nrows(),
                ncols: m.ncols(),
            });
        }
        let n = m.nrows();
        let (kl, ku) = m.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
            pivots: vec![0; n],
        };
        for (i, j, v) in m.triplets() {
            *lu.at_mut(i, j) = v;
        }
        lu.factor()?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    fn factor(&mut self) -> Result<()> {
        let n = self.n;
        let tiny = T::lit(1e-300).max(T::min_positive_value());
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + self.kl + self.ku).min(n - 1);
            let mut p = k;
            let mut pmax = self.at(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.at(i, k).abs();
                if v > pmax {
                    p = i;
                    pmax = v;
                }
            }
            if pmax < tiny {
                return Err(Error::SingularPivot(k));
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.at(k, k);
            for i in k + 1..=last_row {
                let l = self.at(i, k) / pivot;
                *self.at_mut(i, k) = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = self.at(k, j);
                    *self.at_mut(i, j) -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_into(&self, b: &[T], x: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        x.copy_from_slice(b);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != T::zero() {
                for i in k + 1..=(k + self.kl).min(n.saturating_sub(1)) {
                    x[i] -= self.at(i, k) * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + self.kl + self.ku).min(n - 1) {
                s -= self.at(i, j) * x[j];
            }
            x[i] = s / self.at(i, i);
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        self.solve_into(b, &mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::dense_lu_solve;
    use crate::linalg::LinearOperator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_lu_on_random_band_requiring_pivoting() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n: usize = 30;
        let (kl, ku) = (3usize, 2usize);
        let mut trip = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal forces row interchanges
                let v: f64 = rng.random_range(-1.0..1.0);
                trip.push((i, j, if i == j { 0.01 * v } else { v }));
            }
        }
        let m = SparseMatrix::from_triplets(n, n, trip).unwrap();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = BandedLu::new(&m).unwrap().solve(&b);
        let xd = dense_lu_solve(&m.to_dense(), &b).unwrap();
        for (a, c) in x.iter().zip(&xd) {
            assert!((a - c).abs() < 1e-9 * (1.0 + c.abs()), "{a} vs {c}");
        }
        let r = crate::linalg::sub(&m.apply(&x), &b);
        assert!(crate::linalg::norm2(&r) < 1e-10);
    }

    #[test]
    fn singular_band_is_rejected() {
        let m = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)])
            .unwrap();
        assert!(matches!(BandedLu::new(&m), Err(Error::SingularPivot(1))));
    }

    #[test]
    fn diagonal_band() {
        let m = SparseMatrix::diagonal(&[2.0, 4.0, 8.0]);
        assert_eq!(BandedLu::new(&m).unwrap().solve(&[2.0, 4.0, 8.0]), vec![1.0; 3]);
    }
}

//! Small dense kernels used for exact sub-solves, oracles and field-of-values
//! diagnostics.

use crate::error::{check_len, Error, Result};
use crate::linalg::operator::LinearOperator;
use crate::scalar::Scalar;
use std::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    nrows: usize,
    ncols: usize,
    values: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            values: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_row_major(nrows: usize, ncols: usize, values: Vec<T>) -> Result<Self> {
        check_len(nrows * ncols, values.len())?;
        Ok(Self {
            nrows,
            ncols,
            values,
        })
    }

    pub fn from_rows(rows: &[&[T]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(nrows * ncols);
        for r in rows {
            check_len(ncols, r.len())?;
            values.extend_from_slice(r);
        }
        Ok(Self {
            nrows,
            ncols,
            values,
        })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                values.push(f(i, j));
            }
        }
        Self {
            nrows,
            ncols,
            values,
        }
    }

    pub fn diagonal(d: &[T]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    /// Dense matrix of an operator, one column per unit vector.
    pub fn from_operator<O: LinearOperator<T> + ?Sized>(op: &O) -> Self {
        let (m, n) = (op.nrows(), op.ncols());
        let mut d = Self::zeros(m, n);
        let mut e = vec![T::zero(); n];
        let mut col = vec![T::zero(); m];
        for j in 0..n {
            e[j] = T::one();
            op.apply_into(&e, &mut col);
            for i in 0..m {
                d[(i, j)] = col[i];
            }
            e[j] = T::zero();
        }
        d
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn as_slice(&self) -> &[T] {
        &self.values
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.ncols..(i + 1) * self.ncols]
    }
    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_len(self.ncols, other.nrows)?;
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.values[i * other.ncols..(i + 1) * other.ncols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add_scaled(&self, a: T, other: &Self, b: T) -> Result<Self> {
        check_len(self.nrows, other.nrows)?;
        check_len(self.ncols, other.ncols)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            values,
        })
    }

    /// (M + Mᵀ)/2
    pub fn symmetric_part(&self) -> Result<Self> {
        self.require_square()?;
        let half = T::lit(0.5);
        Ok(Self::from_fn(self.nrows, self.ncols, |i, j| {
            half * (self[(i, j)] + self[(j, i)])
        }))
    }

    /// (M - Mᵀ)/2
    pub fn skew_part(&self) -> Result<Self> {
        self.require_square()?;
        let half = T::lit(0.5);
        Ok(Self::from_fn(self.nrows, self.ncols, |i, j| {
            half * (self[(i, j)] - self[(j, i)])
        }))
    }

    pub fn frobenius_norm(&self) -> T {
        crate::linalg::norm2(&self.values)
    }

    pub fn trace(&self) -> T {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).sum()
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.nrows != self.ncols {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        Ok(())
    }

    /// Inverse via LU with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let lu = DenseLu::new(self)?;
        let n = self.nrows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = T::zero();
        }
        Ok(inv)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.values[i * self.ncols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.values[i * self.ncols + j]
    }
}

impl<T: Scalar> LinearOperator<T> for DenseMatrix<T> {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = crate::linalg::dot(self.row(i), x);
        }
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        y.fill(T::zero());
        for (i, &xi) in x.iter().enumerate() {
            for (yj, &a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
    }
}

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    pub fn new(m: &DenseMatrix<T>) -> Result<Self> {
        m.require_square()?;
        let n = m.nrows;
        let mut lu = m.values.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = T::lit(1e-300).max(T::min_positive_value());
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax < tiny {
                return Err(Error::SingularPivot(k));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Solves `M x = b` by LU with partial pivoting.
pub fn dense_lu_solve<T: Scalar>(m: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    check_len(m.nrows, b.len())?;
    Ok(DenseLu::new(m)?.solve(b))
}

/// Cholesky factor `M = L Lᵀ` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct DenseCholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> DenseCholesky<T> {
    pub fn new(m: &DenseMatrix<T>) -> Result<Self> {
        m.require_square()?;
        let n = m.nrows;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) {
                return Err(Error::NonPositivePivot(j));
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn factor(&self) -> DenseMatrix<T> {
        DenseMatrix {
            nrows: self.n,
            ncols: self.n,
            values: self.l.clone(),
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn sym_eigs_dense<T: Scalar>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    m.require_square()?;
    let n = m.nrows;
    let fro = m.frobenius_norm();
    let tol = T::rel_tol(1e-12);
    let asym = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .fold(T::zero(), |acc, (i, j)| acc.max((m[(i, j)] - m[(j, i)]).abs()));
    if asym > tol * fro {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    if fro == T::zero() {
        return Ok(vec![T::zero(); n]);
    }
    let mut a = m.symmetric_part()?;
    let off = |a: &DenseMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        if off(&a) <= tol * fro {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`, singular values
/// descending. Computed by one-sided (Hestenes) Jacobi.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// m × k, k = min(m, n); columns for zero singular values are zero.
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    /// n × k
    pub v: DenseMatrix<T>,
}

pub fn svd<T: Scalar>(a: &DenseMatrix<T>) -> Svd<T> {
    if a.nrows < a.ncols {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (m, n) = (a.nrows, a.ncols);
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = crate::linalg::dot(&cols[p], &cols[p]);
                let beta = crate::linalg::dot(&cols[q], &cols[q]);
                let gamma = crate::linalg::dot(&cols[p], &cols[q]);
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
                let (lo, hi) = vcols.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(usize, T)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, crate::linalg::norm2(c)))
        .collect();
    order.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite singular values"));
    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > T::zero() {
            for i in 0..m {
                u[(i, k)] = cols[j][i] / sigma;
            }
        }
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
    }
    Svd { u, s, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual_norm(m: &DenseMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
        let mx = m.apply(x);
        crate::linalg::norm2(&crate::linalg::sub(&mx, b))
    }

    #[test]
    fn lu_identity_and_diagonal() {
        let i3 = DenseMatrix::<f64>::identity(3);
        assert_eq!(dense_lu_solve(&i3, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let d = DenseMatrix::diagonal(&[2.0, 4.0]);
        assert_eq!(dense_lu_solve(&d, &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn lu_random_diagonally_dominant_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut m = DenseMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
        for i in 0..5 {
            m[(i, i)] += 6.0;
        }
        let b: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = dense_lu_solve(&m, &b).unwrap();
        assert!(residual_norm(&m, &x, &b) <= 1e-12 * crate::linalg::norm2(&b));
    }

    #[test]
    fn lu_pivots_and_detects_singularity() {
        let m = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(dense_lu_solve(&m, &[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
        let s = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(dense_lu_solve(&s, &[1.0, 1.0]), Err(Error::SingularPivot(1))));
        assert!(dense_lu_solve(&s, &[1.0]).is_err());
    }

    #[test]
    fn cholesky_matches_lu() {
        let m = DenseMatrix::from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x1: Vec<f64> = DenseCholesky::new(&m).unwrap().solve(&b);
        let x2 = dense_lu_solve(&m, &b).unwrap();
        for (a, c) in x1.iter().zip(&x2) {
            assert!((a - c).abs() < 1e-14);
        }
        let neg = DenseMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(DenseCholesky::new(&neg), Err(Error::NonPositivePivot(1))));
    }

    #[test]
    fn jacobi_examples() {
        let d = DenseMatrix::diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(sym_eigs_dense(&d).unwrap(), vec![1.0, 2.0, 3.0]);
        let swap = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e: Vec<f64> = sym_eigs_dense(&swap).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert_eq!(sym_eigs_dense(&DenseMatrix::<f64>::identity(4)).unwrap(), vec![1.0; 4]);
        let asym = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigs_dense(&asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn jacobi_trace_and_laplacian_spectrum() {
        let n = 20;
        let m = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let e = sym_eigs_dense(&m).unwrap();
        let sum: f64 = e.iter().sum();
        assert!((sum - m.trace()).abs() <= 1e-10 * m.trace());
        for (k, ek) in e.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((ek - exact).abs() < 1e-12, "{k}: {ek} vs {exact}");
        }
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(m, n) in &[(6usize, 4usize), (3, 5)] {
            let a = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            let f = svd(&a);
            assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
            let k = f.s.len();
            let rec = DenseMatrix::from_fn(m, n, |i, j| {
                (0..k).map(|l| f.u[(i, l)] * f.s[l] * f.v[(j, l)]).sum()
            });
            let err = rec.add_scaled(1.0, &a, -1.0).unwrap().frobenius_norm();
            assert!(err < 1e-12, "{err}");
            let ata = a.transpose().matmul(&a).unwrap();
            let ev: Vec<f64> = sym_eigs_dense(&ata).unwrap();
            let top = ev.last().unwrap().sqrt();
            assert!((top - f.s[0]).abs() < 1e-12);
        }
    }
}

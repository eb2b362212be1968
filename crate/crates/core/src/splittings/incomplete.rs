use std::collections::BTreeSet;

use super::{SubSolver, SubSolverMode};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncompleteKind {
    /// `M = L Lᵀ` on the sparsity pattern of the lower triangle.
    Ic0,
    /// `M = L Lᵀ` with fill, dropping entries below a relative threshold.
    Ict,
    /// `M = L U` on the sparsity pattern of the matrix, `L` unit lower.
    Ilu0,
}

/// Sparse triangular factors. For the Cholesky kinds `upper` is empty and
/// the upper factor is the transpose of the lower one.
#[derive(Debug, Clone)]
pub struct IncompleteFactor<T> {
    kind: IncompleteKind,
    lower: Rows<T>,
    diag: Vec<T>,
    upper: Rows<T>,
}

#[derive(Debug, Clone, Default)]
struct Rows<T> {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<T>,
}

impl<T: Copy> Rows<T> {
    fn with_rows(n: usize) -> Self {
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        Self {
            ptr,
            idx: Vec::new(),
            val: Vec::new(),
        }
    }
    fn push(&mut self, j: usize, v: T) {
        self.idx.push(j);
        self.val.push(v);
    }
    fn end_row(&mut self) {
        self.ptr.push(self.idx.len());
    }
    fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.ptr[i]..self.ptr[i + 1];
        (&self.idx[r.clone()], &self.val[r])
    }
}

fn require_square<T: Scalar>(m: &SparseMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn require_symmetric<T: Scalar>(m: &SparseMatrix<T>) -> Result<()> {
    let scale = m.values().iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let asym = m.asymmetry();
    if asym > T::lit(1e-12) * scale.max(T::min_positive_value()) {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    Ok(())
}

/// No-fill incomplete Cholesky of a symmetric matrix.
pub fn ic0<T: Scalar>(h: &SparseMatrix<T>) -> Result<IncompleteFactor<T>> {
    let n = require_square(h)?;
    require_symmetric(h)?;
    let mut lower = Rows::with_rows(n);
    let mut diag = vec![T::zero(); n];
    for i in 0..n {
        let (cols, vals) = h.row(i);
        let start = lower.idx.len();
        let mut hii = T::zero();
        for (&k, &v) in cols.iter().zip(vals) {
            if k > i {
                break;
            }
            if k == i {
                hii = v;
                break;
            }
            // merge row i (entries so far) with row k over columns < k
            let (kc, kv) = lower.row(k);
            let (ic, iv) = (&lower.idx[start..], &lower.val[start..]);
            let (mut p, mut q, mut s) = (0, 0, T::zero());
            while p < ic.len() && q < kc.len() {
                match ic[p].cmp(&kc[q]) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        s += iv[p] * kv[q];
                        p += 1;
                        q += 1;
                    }
                }
            }
            lower.push(k, (v - s) / diag[k]);
        }
        let sq: T = lower.val[start..].iter().map(|&l| l * l).sum();
        let d = hii - sq;
        if !(d > T::zero()) {
            return Err(Error::NonPositivePivot(i));
        }
        diag[i] = d.sqrt();
        lower.end_row();
    }
    Ok(IncompleteFactor {
        kind: IncompleteKind::Ic0,
        lower,
        diag,
        upper: Rows::default(),
    })
}

/// Threshold incomplete Cholesky: entries of row `i` of `L` smaller than
/// `droptol · ‖h_i‖` are discarded. `droptol = 0` gives the exact factor.
pub fn ict<T: Scalar>(h: &SparseMatrix<T>, droptol: T) -> Result<IncompleteFactor<T>> {
    let n = require_square(h)?;
    require_symmetric(h)?;
    if !(droptol >= T::zero()) {
        return Err(Error::InvalidParameter(format!("droptol must be >= 0, got {droptol}")));
    }
    let mut lower = Rows::with_rows(n);
    // columns of L below the diagonal, filled as rows complete
    let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    let mut diag = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut nz = BTreeSet::new();
    for i in 0..n {
        let (hc, hv) = h.row(i);
        let mut hii = T::zero();
        let rownorm = crate::linalg::norm2(hv);
        for (&k, &v) in hc.iter().zip(hv) {
            if k < i {
                w[k] = v;
                nz.insert(k);
            } else if k == i {
                hii = v;
            }
        }
        let mut d = hii;
        while let Some(k) = nz.pop_first() {
            let lik = w[k] / diag[k];
            w[k] = T::zero();
            if lik.abs() < droptol * rownorm {
                continue;
            }
            for &(j, ljk) in &cols[k] {
                if j >= i {
                    break;
                }
                w[j] -= ljk * lik;
                nz.insert(j);
            }
            lower.push(k, lik);
            d -= lik * lik;
        }
        if !(d > T::zero()) {
            return Err(Error::NonPositivePivot(i));
        }
        diag[i] = d.sqrt();
        let r = lower.ptr[i]..lower.idx.len();
        for (&k, &v) in lower.idx[r.clone()].iter().zip(&lower.val[r]) {
            cols[k].push((i, v));
        }
        lower.end_row();
    }
    Ok(IncompleteFactor {
        kind: IncompleteKind::Ict,
        lower,
        diag,
        upper: Rows::default(),
    })
}

/// No-fill incomplete LU. Every diagonal entry must be present in the pattern.
pub fn ilu0<T: Scalar>(a: &SparseMatrix<T>) -> Result<IncompleteFactor<T>> {
    let n = require_square(a)?;
    let ptr = a.row_starts();
    let idx = a.col_indices();
    let mut val = a.values().to_vec();
    let mut diag_pos = vec![usize::MAX; n];
    for i in 0..n {
        for p in ptr[i]..ptr[i + 1] {
            if idx[p] == i {
                diag_pos[i] = p;
            }
        }
        if diag_pos[i] == usize::MAX {
            return Err(Error::ZeroPivot(i));
        }
    }
    let mut marker = vec![usize::MAX; n];
    for i in 0..n {
        for p in ptr[i]..ptr[i + 1] {
            marker[idx[p]] = p;
        }
        for p in ptr[i]..ptr[i + 1] {
            let k = idx[p];
            if k >= i {
                break;
            }
            let pivot = val[diag_pos[k]];
            if pivot == T::zero() {
                return Err(Error::ZeroPivot(k));
            }
            let lik = val[p] / pivot;
            val[p] = lik;
            for q in diag_pos[k] + 1..ptr[k + 1] {
                let m = marker[idx[q]];
                if m != usize::MAX {
                    let u = val[q];
                    val[m] -= lik * u;
                }
            }
        }
        for p in ptr[i]..ptr[i + 1] {
            marker[idx[p]] = usize::MAX;
        }
        if val[diag_pos[i]] == T::zero() {
            return Err(Error::ZeroPivot(i));
        }
    }
    let mut lower = Rows::with_rows(n);
    let mut upper = Rows::with_rows(n);
    let mut diag = vec![T::zero(); n];
    for i in 0..n {
        for p in ptr[i]..ptr[i + 1] {
            match idx[p].cmp(&i) {
                std::cmp::Ordering::Less => lower.push(idx[p], val[p]),
                std::cmp::Ordering::Equal => diag[i] = val[p],
                std::cmp::Ordering::Greater => upper.push(idx[p], val[p]),
            }
        }
        lower.end_row();
        upper.end_row();
    }
    Ok(IncompleteFactor {
        kind: IncompleteKind::Ilu0,
        lower,
        diag,
        upper,
    })
}

impl<T: Scalar> IncompleteFactor<T> {
    pub fn kind(&self) -> IncompleteKind {
        self.kind
    }

    pub fn nnz(&self) -> usize {
        self.lower.idx.len() + self.upper.idx.len() + self.diag.len()
    }

    fn is_cholesky(&self) -> bool {
        self.kind != IncompleteKind::Ilu0
    }

    /// The preconditioner matrix `L Lᵀ` or `L U`, densely. Intended for checks.
    pub fn product(&self) -> crate::linalg::DenseMatrix<T> {
        let n = self.diag.len();
        let mut l = crate::linalg::DenseMatrix::zeros(n, n);
        let mut u = crate::linalg::DenseMatrix::zeros(n, n);
        for i in 0..n {
            let (c, v) = self.lower.row(i);
            for (&j, &x) in c.iter().zip(v) {
                l[(i, j)] = x;
            }
            if self.is_cholesky() {
                l[(i, i)] = self.diag[i];
            } else {
                l[(i, i)] = T::one();
                u[(i, i)] = self.diag[i];
                let (c, v) = self.upper.row(i);
                for (&j, &x) in c.iter().zip(v) {
                    u[(i, j)] = x;
                }
            }
        }
        if self.is_cholesky() {
            u = l.transpose();
        }
        l.matmul(&u).expect("square factors")
    }
}

impl<T: Scalar> SubSolver<T> for IncompleteFactor<T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn mode(&self) -> SubSolverMode {
        SubSolverMode::IncompleteFactor
    }

    fn apply_into(&self, r: &[T], out: &mut [T]) {
        let n = self.diag.len();
        assert_eq!(r.len(), n, "incomplete factor: rhs length");
        assert_eq!(out.len(), n, "incomplete factor: output length");
        let chol = self.is_cholesky();
        for i in 0..n {
            let (c, v) = self.lower.row(i);
            let mut s = r[i];
            for (&j, &x) in c.iter().zip(v) {
                s -= x * out[j];
            }
            out[i] = if chol { s / self.diag[i] } else { s };
        }
        if chol {
            for i in (0..n).rev() {
                out[i] /= self.diag[i];
                let xi = out[i];
                let (c, v) = self.lower.row(i);
                for (&j, &x) in c.iter().zip(v) {
                    out[j] -= x * xi;
                }
            }
        } else {
            for i in (0..n).rev() {
                let (c, v) = self.upper.row(i);
                let mut s = out[i];
                for (&j, &x) in c.iter().zip(v) {
                    s -= x * out[j];
                }
                out[i] = s / self.diag[i];
            }
        }
    }
}

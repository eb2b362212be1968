//! Compressed sparse row storage.

use crate::error::{check_len, Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::operator::LinearOperator;
use crate::scalar::Scalar;

/// Real matrix in compressed-row form.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_starts: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed and
    /// entries that end up exactly zero are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = impl std::borrow::Borrow<(usize, usize, T)>>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, T)> = Vec::new();
        for t in triplets {
            let (row, col, v) = *t.borrow();
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfBounds {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(entries.len()));
            }
            entries.push((row, col, v));
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_starts = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        // prune exact zeros
        let mut keep_cols = Vec::with_capacity(col_indices.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_indices).zip(values) {
            if v != T::zero() {
                row_starts[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..nrows {
            row_starts[i + 1] += row_starts[i];
        }
        Ok(Self {
            nrows,
            ncols,
            row_starts,
            col_indices: keep_cols,
            values: keep_vals,
        })
    }

    /// Builds from raw CSR arrays, validating every structural invariant.
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_starts: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        check_len(nrows + 1, row_starts.len())?;
        check_len(col_indices.len(), values.len())?;
        if row_starts[0] != 0 || row_starts[nrows] != values.len() {
            return Err(Error::InvalidParameter("row_starts endpoints".into()));
        }
        for i in 0..nrows {
            let (s, e) = (row_starts[i], row_starts[i + 1]);
            if s > e {
                return Err(Error::InvalidParameter(format!("row_starts decreases at row {i}")));
            }
            for k in s..e {
                let c = col_indices[k];
                if c >= ncols {
                    return Err(Error::IndexOutOfBounds {
                        row: i,
                        col: c,
                        nrows,
                        ncols,
                    });
                }
                if k > s && col_indices[k - 1] >= c {
                    return Err(Error::InvalidParameter(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
                if values[k] == T::zero() {
                    return Err(Error::InvalidParameter(format!("explicit zero in row {i}")));
                }
                if !values[k].is_finite() {
                    return Err(Error::NonFinite(k));
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_starts,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_starts: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self::from_triplets(n, n, d.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal entries are in bounds")
    }

    pub fn from_dense(m: &DenseMatrix<T>) -> Self {
        let trip = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, m[(i, j)]));
        Self::from_triplets(m.nrows(), m.ncols(), trip).expect("dense entries are in bounds")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nnz(&self) -> usize {
        self.values.len()
    }
    pub fn row_starts(&self) -> &[usize] {
        &self.row_starts
    }
    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `(columns, values)` of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_starts[i]..self.row_starts[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or_else(|_| T::zero())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn diagonal_values(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = vec![T::zero(); self.nnz()];
        for i in 0..self.nrows {
            let (rc, rv) = self.row(i);
            for (&j, &v) in rc.iter().zip(rv) {
                let dst = next[j];
                cols[dst] = i;
                vals[dst] = v;
                next[j] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_starts: counts,
            col_indices: cols,
            values: vals,
        }
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        check_len(self.nrows, other.nrows)?;
        check_len(self.ncols, other.ncols)?;
        let trip = self
            .triplets()
            .map(|(i, j, v)| (i, j, a * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, b * v)));
        Self::from_triplets(self.nrows, self.ncols, trip)
    }

    /// `self + shift * I` for square matrices.
    pub fn shift_diagonal(&self, shift: T) -> Result<Self> {
        self.require_square()?;
        let n = self.nrows;
        let trip = self.triplets().chain((0..n).map(|i| (i, i, shift)));
        Self::from_triplets(n, n, trip)
    }

    pub fn scaled(&self, a: T) -> Self {
        let trip = self.triplets().map(|(i, j, v)| (i, j, a * v));
        Self::from_triplets(self.nrows, self.ncols, trip).expect("same pattern")
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Lower and upper bandwidths `(kl, ku)`.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.triplets().fold((0, 0), |(kl, ku), (i, j, _)| {
            if i > j {
                (kl.max(i - j), ku)
            } else {
                (kl, ku.max(j - i))
            }
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.nrows, other.ncols);
        let trip = self.triplets().flat_map(|(i, j, a)| {
            other
                .triplets()
                .map(move |(k, l, b)| (i * p + k, j * q + l, a * b))
        });
        Self::from_triplets(self.nrows * p, self.ncols * q, trip).expect("kron indices in bounds")
    }

    fn require_square(&self) -> Result<()> {
        if self.nrows != self.ncols {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        Ok(())
    }

    /// Largest |A_ij - A_ji| relative to the largest |A_ij|.
    pub fn asymmetry(&self) -> T {
        let at = self.transpose();
        let diff = self.linear_combination(T::one(), &at, -T::one()).expect("square");
        let amax = self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let dmax = diff.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if amax > T::zero() {
            dmax / amax
        } else {
            T::zero()
        }
    }
}

/// y = A x
pub fn spmv<T: Scalar>(a: &SparseMatrix<T>, x: &[T]) -> Result<Vec<T>> {
    check_len(a.ncols, x.len())?;
    Ok(a.apply(x))
}

/// y = Aᵀ x
pub fn spmv_t<T: Scalar>(a: &SparseMatrix<T>, x: &[T]) -> Result<Vec<T>> {
    check_len(a.nrows, x.len())?;
    Ok(a.apply_transpose(x))
}

/// Symmetric and skew-symmetric parts `((A+Aᵀ)/2, (A-Aᵀ)/2)`.
pub fn split_hs<T: Scalar>(a: &SparseMatrix<T>) -> Result<(SparseMatrix<T>, SparseMatrix<T>)> {
    a.require_square()?;
    let half = T::lit(0.5);
    let at = a.transpose();
    let h = a.linear_combination(half, &at, half)?;
    let s = a.linear_combination(half, &at, -half)?;
    Ok((h, s))
}

impl<T: Scalar> LinearOperator<T> for SparseMatrix<T> {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "spmv: x length");
        assert_eq!(y.len(), self.nrows, "spmv: y length");
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = T::zero();
            for k in self.row_starts[i]..self.row_starts[i + 1] {
                s += self.values[k] * x[self.col_indices[k]];
            }
            *yi = s;
        }
    }

    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.nrows, "spmv_t: x length");
        assert_eq!(y.len(), self.ncols, "spmv_t: y length");
        y.fill(T::zero());
        for (i, &xi) in x.iter().enumerate() {
            for k in self.row_starts[i]..self.row_starts[i + 1] {
                y[self.col_indices[k]] += self.values[k] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> SparseMatrix<f64> {
        SparseMatrix::from_triplets(2, 2, [(0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap()
    }

    #[test]
    fn construction_merges_and_prunes() {
        let a = SparseMatrix::from_triplets(
            2,
            3,
            [(1, 2, 1.0), (0, 1, 2.0), (1, 2, -1.0), (0, 1, 3.0), (0, 0, 0.0)],
        )
        .unwrap();
        assert_eq!(a.row_starts(), &[0, 1, 1]);
        assert_eq!(a.col_indices(), &[1]);
        assert_eq!(a.values(), &[5.0]);
    }

    #[test]
    fn construction_rejects_out_of_bounds() {
        let err = SparseMatrix::from_triplets(2, 2, [(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfBounds { row: 2, .. }));
    }

    #[test]
    fn from_csr_validates() {
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 1], vec![0], vec![0.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn spmv_examples() {
        let i3 = SparseMatrix::<f64>::identity(3);
        assert_eq!(spmv(&i3, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let z = SparseMatrix::<f64>::zeros(2, 2);
        assert_eq!(spmv(&z, &[5.0, -1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(spmv(&two_by_two(), &[1.0, 1.0]).unwrap(), vec![2.0, 4.0]);
        assert!(matches!(
            spmv(&two_by_two(), &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn spmv_t_examples() {
        let i3 = SparseMatrix::<f64>::identity(3);
        assert_eq!(spmv_t(&i3, &[4.0, 5.0, 6.0]).unwrap(), vec![4.0, 5.0, 6.0]);
        assert_eq!(spmv_t(&two_by_two(), &[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
        let row = SparseMatrix::from_triplets(1, 3, [(0, 0, 1.0), (0, 1, 2.0), (0, 2, 4.0)]).unwrap();
        assert_eq!(spmv_t(&row, &[2.0]).unwrap(), vec![2.0, 4.0, 8.0]);
        assert!(spmv_t(&row, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn spmv_t_matches_explicit_transpose_bitwise() {
        let a = SparseMatrix::from_triplets(
            3,
            4,
            [(0, 0, 0.1), (0, 3, 1.7), (1, 1, -2.3), (2, 0, 3.3), (2, 3, 1e-3), (1, 3, 0.7)],
        )
        .unwrap();
        let x = [0.3, -1.1, 2.9];
        let y1 = spmv_t(&a, &x).unwrap();
        let y2 = spmv(&a.transpose(), &x).unwrap();
        assert_eq!(y1, y2);
    }

    #[test]
    fn split_examples() {
        let sym = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0)]).unwrap();
        let (h, s) = split_hs(&sym).unwrap();
        assert_eq!(h, sym);
        assert_eq!(s.nnz(), 0);

        let skew = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, -1.0)]).unwrap();
        let (h, s) = split_hs(&skew).unwrap();
        assert_eq!(h.nnz(), 0);
        assert_eq!(s, skew);

        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)]).unwrap();
        let (h, s) = split_hs(&a).unwrap();
        assert_eq!(h.to_dense().as_slice(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.to_dense().as_slice(), &[0.0, 1.0, -1.0, 0.0]);

        let rect = SparseMatrix::<f64>::zeros(2, 3);
        assert!(matches!(split_hs(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn kron_and_bandwidth() {
        let t = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)]).unwrap();
        let k = SparseMatrix::<f64>::identity(2).kron(&t);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k.get(2, 3), 2.0);
        assert_eq!(k.get(1, 2), 0.0);
        assert_eq!(k.bandwidths(), (0, 1));
    }
}

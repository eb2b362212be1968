use super::{SubSolver, SubSolverMode};
use crate::error::{Error, Result};
use crate::linalg::{BandedLu, DenseLu, SparseMatrix};
use crate::scalar::Scalar;

/// How an exact sub-solver factors its matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactRealization {
    Dense,
    Banded,
    /// Diagonal if the matrix is diagonal, dense up to 400 unknowns, banded beyond.
    Auto,
}

pub struct DenseLuSolver<T> {
    lu: DenseLu<T>,
}

impl<T: Scalar> DenseLuSolver<T> {
    pub fn new(m: &SparseMatrix<T>) -> Result<Self> {
        Ok(Self {
            lu: DenseLu::new(&m.to_dense())?,
        })
    }
}

impl<T: Scalar> SubSolver<T> for DenseLuSolver<T> {
    fn dim(&self) -> usize {
        self.lu.dim()
    }
    fn mode(&self) -> SubSolverMode {
        SubSolverMode::ExactDense
    }
    fn apply_into(&self, r: &[T], out: &mut [T]) {
        out.copy_from_slice(&self.lu.solve(r));
    }
}

impl<T: Scalar> SubSolver<T> for BandedLu<T> {
    fn dim(&self) -> usize {
        BandedLu::dim(self)
    }
    fn mode(&self) -> SubSolverMode {
        SubSolverMode::ExactBanded
    }
    fn apply_into(&self, r: &[T], out: &mut [T]) {
        self.solve_into(r, out)
    }
}

#[derive(Debug, Clone)]
pub struct DiagonalSolver<T> {
    inv: Vec<T>,
}

impl<T: Scalar> DiagonalSolver<T> {
    pub fn new(d: &[T]) -> Result<Self> {
        let inv = d
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == T::zero() || !v.is_finite() {
                    Err(Error::ZeroPivot(i))
                } else {
                    Ok(T::one() / v)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { inv })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inv: vec![T::one(); n],
        }
    }
}

impl<T: Scalar> SubSolver<T> for DiagonalSolver<T> {
    fn dim(&self) -> usize {
        self.inv.len()
    }
    fn mode(&self) -> SubSolverMode {
        SubSolverMode::ExactDiagonal
    }
    fn apply_into(&self, r: &[T], out: &mut [T]) {
        for ((o, &x), &d) in out.iter_mut().zip(r).zip(&self.inv) {
            *o = x * d;
        }
    }
}

/// Factors `m` exactly.
pub fn exact_solver<'a, T: Scalar>(
    m: &SparseMatrix<T>,
    how: ExactRealization,
) -> Result<Box<dyn SubSolver<T> + 'a>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    Ok(match how {
        ExactRealization::Dense => Box::new(DenseLuSolver::new(m)?),
        ExactRealization::Banded => Box::new(BandedLu::new(m)?),
        ExactRealization::Auto => {
            if m.bandwidths() == (0, 0) {
                Box::new(DiagonalSolver::new(&m.diagonal_values())?)
            } else if m.nrows() <= 400 {
                Box::new(DenseLuSolver::new(m)?)
            } else {
                Box::new(BandedLu::new(m)?)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, sub, LinearOperator};

    fn tridiag(n: usize) -> SparseMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.5));
                t.push((i + 1, i, -0.5));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn all_realizations_invert() {
        let m = tridiag(12);
        let b: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        for how in [ExactRealization::Dense, ExactRealization::Banded, ExactRealization::Auto] {
            let s = exact_solver(&m, how).unwrap();
            assert!(s.mode().is_exact());
            let x = s.apply(&b);
            assert!(norm2(&sub(&m.apply(&x), &b)) < 1e-12);
        }
    }

    #[test]
    fn auto_picks_diagonal() {
        let m = SparseMatrix::diagonal(&[2.0, 4.0]);
        let s = exact_solver(&m, ExactRealization::Auto).unwrap();
        assert_eq!(s.mode(), SubSolverMode::ExactDiagonal);
        assert_eq!(s.apply(&[1.0, 1.0]), vec![0.5, 0.25]);
    }

    #[test]
    fn zero_diagonal_rejected() {
        assert!(matches!(DiagonalSolver::new(&[1.0, 0.0]), Err(Error::ZeroPivot(1))));
    }
}

use super::{SubSolver, SubSolverMode};
use crate::linalg::{norm2, LinearOperator};
use crate::scalar::Scalar;
use crate::solvers::{cg_kernel, gmres_kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMethod {
    Cg,
    Gmres { restart: usize },
}

/// Approximate `M⁻¹r` by a truncated Krylov solve from a zero start. The
/// result is whatever the inner iteration reaches; failures are not errors.
pub struct InnerSolver<'p, T, O> {
    op: O,
    method: InnerMethod,
    tol: T,
    maxit: usize,
    precond: Option<Box<dyn SubSolver<T> + 'p>>,
}

/// Wraps `op` (the splitting matrix `M`) in an inner iterative sub-solver
/// with relative tolerance `tol`.
pub fn make_inner_subsolver<'p, T: Scalar, O: LinearOperator<T>>(
    op: O,
    method: InnerMethod,
    tol: T,
    maxit: usize,
    precond: Option<Box<dyn SubSolver<T> + 'p>>,
) -> InnerSolver<'p, T, O> {
    InnerSolver {
        op,
        method,
        tol,
        maxit,
        precond,
    }
}

impl<T: Scalar, O: LinearOperator<T>> SubSolver<T> for InnerSolver<'_, T, O> {
    fn dim(&self) -> usize {
        self.op.nrows()
    }

    fn mode(&self) -> SubSolverMode {
        SubSolverMode::InnerIterative
    }

    fn apply_into(&self, r: &[T], out: &mut [T]) {
        out.fill(T::zero());
        let tol_abs = self.tol * norm2(r);
        let pre = self.precond.as_deref();
        match self.method {
            InnerMethod::Cg => {
                cg_kernel(&self.op, r, out, pre, tol_abs, self.maxit, &mut |_, _| false);
            }
            InnerMethod::Gmres { restart } => {
                gmres_kernel(&self.op, r, out, pre, restart, tol_abs, self.maxit, &mut |_, _| false);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{residual, SparseMatrix};
    use crate::splittings::ilu0;

    #[test]
    fn inner_solvers_reach_tolerance() {
        let n = 40;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let m = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let r: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).cos()).collect();
        let cg = make_inner_subsolver(&m, InnerMethod::Cg, 1e-10, 100, None);
        let x = cg.apply(&r);
        assert!(norm2(&residual(&m, &r, &x)) <= 1e-10 * norm2(&r));
        let pre: Box<dyn SubSolver<f64>> = Box::new(ilu0(&m).unwrap());
        let gm = make_inner_subsolver(&m, InnerMethod::Gmres { restart: 10 }, 1e-10, 100, Some(pre));
        assert_eq!(gm.mode(), SubSolverMode::InnerIterative);
        let x = gm.apply(&r);
        assert!(norm2(&residual(&m, &r, &x)) <= 1e-10 * norm2(&r));
    }

    #[test]
    fn truncated_inner_solve_is_deterministic() {
        let m = SparseMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, 3.0), (2, 2, 5.0), (0, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let s = make_inner_subsolver(&m, InnerMethod::Cg, 1e-14, 1, None);
        assert_eq!(s.apply(&[1.0, 1.0, 1.0]), s.apply(&[1.0, 1.0, 1.0]));
    }
}

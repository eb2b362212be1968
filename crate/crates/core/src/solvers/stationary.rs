use super::{Monitor, SolveOptions, SolveReport, Termination};
use crate::error::{check_len, Error, Result};
use crate::illposed::{AugmentedSystem, OmegaInner, OmegaSkewSolver};
use crate::linalg::{axpy, norm2, residual, LinearOperator, SparseMatrix};
use crate::scalar::Scalar;
use crate::splittings::{hss_pair, DiagonalSolver, ExactRealization, SplittingPair};

/// `x ← x + M̃⁻¹(b - Ax)`, then `x ← x + M̂⁻¹(b - Ax)`, repeated. This is the
/// stationary iteration of the two splittings with unit step lengths.
pub fn stationary_two_step_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    split: &SplittingPair<'_, T>,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NotSquare {
            nrows: n,
            ncols: a.ncols(),
        });
    }
    check_len(n, b.len())?;
    check_len(n, x0.len())?;
    check_len(n, split.dim())?;
    let mut mon = Monitor::new(opts, b);
    let mut x = x0.to_vec();
    let mut r = residual(a, b, &x);
    let r0 = norm2(&r);
    mon.record(&x, r0);
    if mon.done(&x, r0) {
        return Ok(mon.finish(x, 0, Termination::Converged));
    }
    let mut termination = Termination::MaxIterations;
    let mut k = 0;
    'outer: while k < opts.maxit {
        k += 1;
        for (which, solver) in [&split.m_tilde, &split.m_hat].into_iter().enumerate() {
            let d = solver.apply(&r);
            axpy(T::one(), &d, &mut x);
            r = residual(a, b, &x);
            let rn = norm2(&r);
            if which == 0 {
                mon.record_half(rn);
            }
            if mon.done(&x, rn) {
                mon.record(&x, rn);
                termination = Termination::Converged;
                break 'outer;
            }
            if !rn.is_finite() {
                mon.record(&x, rn);
                termination = Termination::Stagnation;
                break 'outer;
            }
        }
        mon.record(&x, norm2(&r));
    }
    Ok(mon.finish(x, k, termination))
}

/// HSS iteration with exact solves of `αI + H(A)` and `αI + S(A)`.
pub fn hss_solve<T: Scalar>(
    a: &SparseMatrix<T>,
    b: &[T],
    x0: &[T],
    alpha: T,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let split = hss_pair(a, alpha, ExactRealization::Auto)?;
    stationary_two_step_solve(a, b, x0, &split, opts)
}

/// Parameters of the modified shifted HSS iteration on an augmented system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MshssParams<T> {
    pub alpha: T,
    /// Scalar of the `Ω = blkdiag(I, γI)` shift.
    pub gamma: T,
    /// Extreme singular values of `A`, used only to derive `alpha`.
    pub sigma1: T,
    pub sigman: T,
}

impl<T: Scalar> MshssParams<T> {
    /// `alpha` set from `mshss_alpha_star`.
    pub fn optimal(gamma: T, sigma1: T, sigman: T) -> Self {
        Self {
            alpha: mshss_alpha_star(gamma, sigma1, sigman),
            gamma,
            sigma1,
            sigman,
        }
    }
}

/// `α* = (γ(σ1² + σn²) + 2σ1²σn²) / (2γ + σ1² + σn²)`.
pub fn mshss_alpha_star<T: Scalar>(gamma: T, sigma1: T, sigman: T) -> T {
    let (s1, sn) = (sigma1 * sigma1, sigman * sigman);
    let two = T::lit(2.0);
    (gamma * (s1 + sn) + two * s1 * sn) / (two * gamma + s1 + sn)
}

/// MSHSS: stationary alternation of `αI + H(K)` (diagonal) and `Ω + S(K)`.
pub fn mshss_solve<T: Scalar, O: LinearOperator<T>>(
    sys: &AugmentedSystem<O, T>,
    b: &[T],
    x0: &[T],
    p: &MshssParams<T>,
    inner: OmegaInner<T>,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    let mu2 = sys.mu() * sys.mu();
    if !(p.alpha > T::zero()) || !(p.gamma > T::zero()) || p.gamma == mu2 {
        return Err(Error::InvalidParameter(format!(
            "MSHSS needs alpha > 0 and gamma > 0, gamma != mu^2 (alpha {}, gamma {})",
            p.alpha, p.gamma
        )));
    }
    let (m, n) = (sys.a().nrows(), sys.a().ncols());
    let mut d = vec![p.alpha + T::one(); m];
    d.extend(std::iter::repeat_n(p.alpha + mu2, n));
    let split = SplittingPair::new(
        DiagonalSolver::new(&d)?,
        OmegaSkewSolver::new(sys.a(), p.gamma, inner)?,
        format!("MSHSS alpha={} gamma={}", p.alpha, p.gamma),
    );
    stationary_two_step_solve(sys, b, x0, &split, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_lu_solve, DenseMatrix};

    #[test]
    fn hss_scalar_recurrence() {
        // A = I, α = 1: H = I, S = 0. x½ = (x + b)/2, then (αI + S) = I solves exactly
        let a = SparseMatrix::<f64>::identity(1);
        let rep = hss_solve(&a, &[4.0], &[1.0], 1.0, &SolveOptions::new(1e-14, 3)).unwrap();
        assert_eq!(rep.half_step_residuals, vec![1.5]);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.solution, vec![4.0]);
    }

    #[test]
    fn hss_zero_stays_zero() {
        let a = SparseMatrix::<f64>::identity(3);
        let rep = hss_solve(&a, &[0.0; 3], &[0.0; 3], 1.0, &SolveOptions::new(1e-8, 3)).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.solution, vec![0.0; 3]);
    }

    #[test]
    fn hss_matches_dense_map() {
        let d = DenseMatrix::from_rows(&[&[2.0, 1.0], &[-1.0, 2.0]]).unwrap();
        let a = SparseMatrix::from_dense(&d);
        let b = [1.0, 3.0];
        let rep = hss_solve(&a, &b, &[0.0; 2], 1.0, &SolveOptions::new(1e-30, 2)).unwrap();
        // dense oracle: (αI+H) x½ = (αI-S) x + b, (αI+S) x1 = (αI-H) x½ + b
        let h = DenseMatrix::from_rows(&[&[3.0, 0.0], &[0.0, 3.0]]).unwrap();
        let s = DenseMatrix::from_rows(&[&[1.0, 1.0], &[-1.0, 1.0]]).unwrap();
        let ms = DenseMatrix::from_rows(&[&[1.0, -1.0], &[1.0, 1.0]]).unwrap();
        let mh = DenseMatrix::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let mut x = vec![0.0, 0.0];
        for _ in 0..2 {
            let rhs: Vec<f64> = ms.apply(&x).iter().zip(&b).map(|(u, v)| u + v).collect();
            let xh = dense_lu_solve(&h, &rhs).unwrap();
            let rhs: Vec<f64> = mh.apply(&xh).iter().zip(&b).map(|(u, v)| u + v).collect();
            x = dense_lu_solve(&s, &rhs).unwrap();
        }
        assert!(crate::linalg::rel_diff(&rep.solution, &x) < 1e-14);
    }

    #[test]
    fn alpha_star_limit() {
        let mu: f64 = 0.3;
        let g = mu * mu;
        let a = mshss_alpha_star(g, 1.0, 0.0);
        assert!((a - g / (2.0 * g + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn mshss_block_diagonal_one_alternation() {
        // A = 0, μ = 1, γ = 2: K = I, M̃ = (α+1)I, M̂ = blkdiag(I, 2I)
        let a = SparseMatrix::<f64>::zeros(2, 2);
        let sys = AugmentedSystem::new(&a, 1.0, 2.0).unwrap();
        let p = MshssParams {
            alpha: 1.0,
            gamma: 2.0,
            sigma1: 0.0,
            sigman: 0.0,
        };
        let b = [1.0, 2.0, 3.0, 4.0];
        let inner = OmegaInner::SchurCg { tol: 1e-12, maxit: 10 };
        // one alternation by hand: x½ = b/2, x1 = x½ + M̂⁻¹(b/2)
        let one = mshss_solve(&sys, &b, &[0.0; 4], &p, inner, &SolveOptions::new(1e-14, 1)).unwrap();
        let expect = [1.0, 2.0, 0.75 * 3.0, 0.75 * 4.0];
        assert!(crate::linalg::rel_diff(&one.solution, &expect) < 1e-12);
        let rep = mshss_solve(&sys, &b, &[0.0; 4], &p, inner, &SolveOptions::new(1e-12, 100)).unwrap();
        assert_eq!(rep.termination, Termination::Converged);
        assert!(crate::linalg::rel_diff(&rep.solution, &b) < 1e-11);
    }
}

use super::{Monitor, SolveOptions, SolveReport, Termination};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, residual, LinearOperator};
use crate::scalar::Scalar;
use crate::splittings::SubSolver;

const RESIDUAL_REFRESH: usize = 50;

/// Generalized conjugate gradients (CGW) for `A = M + S` with `M`
/// symmetric positive definite and `S` skew-symmetric. `m` applies `M⁻¹`.
///
/// `x_{k+1} = ω_{k+1}(x_k + z_k) + (1 - ω_{k+1}) x_{k-1}`, `M z_k = r_k`,
/// `ω_1 = 1`, `ω_{k+1} = 1 / (1 + ρ_k / (ρ_{k-1} ω_k))`, `ρ_k = ⟨z_k, M z_k⟩`.
pub fn cgw_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    m: &dyn SubSolver<T>,
    b: &[T],
    x0: &[T],
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
    check_len(n, m.dim())?;

    let mut mon = Monitor::new(opts, b);
    let mut x = x0.to_vec();
    let mut r = residual(a, b, &x);
    mon.record(&x, norm2(&r));
    if mon.done(&x, norm2(&r)) {
        return Ok(mon.finish(x, 0, Termination::Converged));
    }
    let mut x_prev = x.clone();
    let mut r_prev = r.clone();
    let mut rho_prev = T::zero();
    let mut omega = T::one();
    let mut az = vec![T::zero(); n];
    let mut termination = Termination::MaxIterations;
    let mut k = 0;
    while k < opts.maxit {
        let z = m.apply(&r);
        // ⟨z, M z⟩ = ⟨z, r⟩
        let rho = dot(&z, &r);
        if !(rho > T::zero()) {
            termination = Termination::Stagnation;
            break;
        }
        if k > 0 {
            omega = T::one() / (T::one() + rho / (rho_prev * omega));
        }
        a.apply_into(&z, &mut az);
        let one_m = T::one() - omega;
        for i in 0..n {
            let xn = omega * (x[i] + z[i]) + one_m * x_prev[i];
            let rn = omega * (r[i] - az[i]) + one_m * r_prev[i];
            x_prev[i] = x[i];
            r_prev[i] = r[i];
            x[i] = xn;
            r[i] = rn;
        }
        rho_prev = rho;
        k += 1;
        if k % RESIDUAL_REFRESH == 0 {
            r = residual(a, b, &x);
        }
        let rn = norm2(&r);
        mon.record(&x, rn);
        if mon.done(&x, rn) {
            termination = Termination::Converged;
            break;
        }
        if !rn.is_finite() {
            termination = Termination::Stagnation;
            break;
        }
    }
    Ok(mon.finish(x, k, termination))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_lu_solve, rel_diff, DenseMatrix};
    use crate::splittings::DiagonalSolver;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_converges_in_one_step() {
        let a = DenseMatrix::<f64>::identity(3);
        let m = DiagonalSolver::identity(3);
        let rep = cgw_solve(&a, &m, &[1.0, 2.0, 3.0], &[0.0; 3], &SolveOptions::new(1e-12, 5)).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.solution, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn identity_plus_skew_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut a = DenseMatrix::identity(4);
            for i in 0..4 {
                for j in i + 1..4 {
                    let v = 2.0 * rng.random::<f64>() - 1.0;
                    a[(i, j)] = v;
                    a[(j, i)] = -v;
                }
            }
            let b: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            let m = DiagonalSolver::identity(4);
            let rep = cgw_solve(&a, &m, &b, &[0.0; 4], &SolveOptions::new(1e-13, 20)).unwrap();
            let x = dense_lu_solve(&a, &b).unwrap();
            assert!(rel_diff(&rep.solution, &x) < 1e-8, "{:?}", rep.termination);
            // finite termination in at most n steps
            assert!(rep.iterations <= 4, "iterations {}", rep.iterations);
        }
    }

    #[test]
    fn diagonal_plus_skew_with_preconditioner() {
        let d = [1.0, 3.0, 0.5, 2.0, 5.0];
        let mut a = DenseMatrix::diagonal(&d);
        for (i, j, v) in [(0, 1, 0.4), (1, 2, -1.0), (2, 4, 0.7), (3, 4, 0.2), (0, 3, 0.3)] {
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
        let b = [1.0, -1.0, 2.0, 0.0, 1.0];
        let m = DiagonalSolver::new(&d).unwrap();
        let rep = cgw_solve(&a, &m, &b, &[0.0; 5], &SolveOptions::new(1e-12, 30)).unwrap();
        assert_eq!(rep.termination, Termination::Converged);
        assert!(rel_diff(&rep.solution, &dense_lu_solve(&a, &b).unwrap()) < 1e-9);
    }
}

use super::{Monitor, SolveOptions, SolveReport, Termination};
use crate::error::{check_len, Error, Result};
use crate::illposed::StoppingRule;
use crate::linalg::{axpy, dot, norm2, residual, scale, LinearOperator};
use crate::scalar::Scalar;
use crate::splittings::SubSolver;

/// Preconditioned CG on `x` in place. `observe(x, ‖r‖)` runs after every
/// iteration and may request a stop by returning `true`.
pub(crate) fn cg_kernel<T: Scalar, O: LinearOperator<T> + ?Sized>(
    op: &O,
    b: &[T],
    x: &mut [T],
    precond: Option<&dyn SubSolver<T>>,
    tol_abs: T,
    maxit: usize,
    observe: &mut dyn FnMut(&[T], T) -> bool,
) -> (usize, Termination) {
    let mut r = residual(op, b, x);
    if norm2(&r) <= tol_abs {
        return (0, Termination::Converged);
    }
    let precondition = |r: &[T]| match precond {
        Some(m) => m.apply(r),
        None => r.to_vec(),
    };
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![T::zero(); b.len()];
    for it in 1..=maxit {
        op.apply_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > T::zero()) {
            return (it - 1, Termination::Stagnation);
        }
        let alpha = rz / pq;
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        let rn = norm2(&r);
        let stop = observe(x, rn);
        if rn <= tol_abs || stop {
            return (it, Termination::Converged);
        }
        if !rn.is_finite() {
            return (it, Termination::Stagnation);
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        if rz_new == T::zero() {
            return (it, Termination::Stagnation);
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    (maxit, Termination::MaxIterations)
}

/// Right-preconditioned restarted GMRES on `x` in place, modified
/// Gram–Schmidt Arnoldi and Givens rotations. `observe` sees every residual
/// estimate and the iterate at the end of each cycle.
pub(crate) fn gmres_kernel<T: Scalar, O: LinearOperator<T> + ?Sized>(
    op: &O,
    b: &[T],
    x: &mut [T],
    precond: Option<&dyn SubSolver<T>>,
    restart: usize,
    tol_abs: T,
    maxit: usize,
    observe: &mut dyn FnMut(Option<&[T]>, T) -> bool,
) -> (usize, Termination) {
    let n = b.len();
    let m = restart.max(1);
    let mut total = 0;
    let mut prev_cycle = T::infinity();
    loop {
        let r = residual(op, b, x);
        let beta = norm2(&r);
        if beta <= tol_abs {
            return (total, Termination::Converged);
        }
        if total >= maxit {
            return (total, Termination::MaxIterations);
        }
        if !beta.is_finite() || beta >= prev_cycle * (T::one() - T::rel_tol(1e-15)) {
            return (total, Termination::Stagnation);
        }
        prev_cycle = beta;

        let mut v: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        let mut z: Vec<Vec<T>> = Vec::new();
        let mut v0 = r;
        scale(T::one() / beta, &mut v0);
        v.push(v0);
        let mut h = vec![vec![T::zero(); m]; m + 1];
        let (mut cs, mut sn) = (vec![T::zero(); m], vec![T::zero(); m]);
        let mut g = vec![T::zero(); m + 1];
        g[0] = beta;
        let mut cols = 0;
        let mut stop = false;
        let mut w = vec![T::zero(); n];
        while cols < m && total < maxit {
            let j = cols;
            match precond {
                Some(p) => {
                    let zj = p.apply(&v[j]);
                    op.apply_into(&zj, &mut w);
                    z.push(zj);
                }
                None => op.apply_into(&v[j], &mut w),
            }
            for i in 0..=j {
                h[i][j] = dot(&w, &v[i]);
                axpy(-h[i][j], &v[i], &mut w);
            }
            let hnext = norm2(&w);
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(hnext);
            if denom == T::zero() {
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = hnext / denom;
            h[j][j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            cols += 1;
            total += 1;
            let est = g[j + 1].abs();
            stop = observe(None, est);
            let happy = hnext <= T::lit(1e-14) * denom;
            if est <= tol_abs || happy || stop {
                break;
            }
            let mut vn = w.clone();
            scale(T::one() / hnext, &mut vn);
            v.push(vn);
        }
        // back substitution for the cycle's correction
        let mut y = vec![T::zero(); cols];
        for i in (0..cols).rev() {
            let mut s = g[i];
            for k in i + 1..cols {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        let basis = if precond.is_some() { &z } else { &v };
        for (yi, bi) in y.iter().zip(basis) {
            axpy(*yi, bi, x);
        }
        let rn = norm2(&residual(op, b, x));
        if observe(Some(x), rn) || stop {
            return (total, Termination::Converged);
        }
        if cols == 0 {
            return (total, Termination::Stagnation);
        }
    }
}

fn check_square<T: Scalar, O: LinearOperator<T> + ?Sized>(a: &O, b: &[T], x0: &[T]) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    check_len(a.nrows(), b.len())?;
    check_len(a.ncols(), x0.len())
}

/// Preconditioned conjugate gradients for a symmetric positive definite operator.
pub fn pcg_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    precond: Option<&dyn SubSolver<T>>,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    check_square(a, b, x0)?;
    if let Some(p) = precond {
        check_len(a.nrows(), p.dim())?;
    }
    let mut mon = Monitor::new(opts, b);
    let mut x = x0.to_vec();
    let r0 = norm2(&residual(a, b, &x));
    mon.record(&x, r0);
    if mon.done(&x, r0) {
        return Ok(mon.finish(x, 0, Termination::Converged));
    }
    let tol = mon.tol_abs();
    let stop = opts.stop;
    let (it, term) = cg_kernel(a, b, &mut x, precond, tol, opts.maxit, &mut |x, rn| {
        mon.record(x, rn);
        stop.is_some_and(|f| f(x))
    });
    Ok(mon.finish(x, it, term))
}

/// Restarted GMRES(`restart`), right-preconditioned. `iterations` counts
/// inner (Arnoldi) steps.
pub fn gmres_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    restart: usize,
    precond: Option<&dyn SubSolver<T>>,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    check_square(a, b, x0)?;
    if restart == 0 {
        return Err(Error::InvalidParameter("restart must be >= 1".into()));
    }
    if let Some(p) = precond {
        check_len(a.nrows(), p.dim())?;
    }
    let mut mon = Monitor::new(opts, b);
    let mut x = x0.to_vec();
    let r0 = norm2(&residual(a, b, &x));
    mon.record(&x, r0);
    if mon.done(&x, r0) {
        return Ok(mon.finish(x, 0, Termination::Converged));
    }
    let tol = mon.tol_abs();
    let stop = opts.stop;
    let mut last = r0;
    let (it, term) = gmres_kernel(a, b, &mut x, precond, restart, tol, opts.maxit, &mut |x, rn| match x {
        Some(x) => {
            // cycle end: replace the estimate with the true residual
            last = rn;
            stop.is_some_and(|f| f(x)) || rn <= tol
        }
        None => {
            mon.record_opt(None, rn);
            false
        }
    });
    mon.record_opt(Some(&x), last);
    Ok(mon.finish(x, it, term))
}

/// CGLS: conjugate gradients on `AᵀA f = Aᵀ g` without forming `AᵀA`.
///
/// Residual histories hold `‖g - A f‖`. The stopping rule is either the
/// normal-equation residual `‖Aᵀ(g - Af)‖ ≤ tol ‖Aᵀg‖` or the discrepancy
/// principle on `‖g - Af‖ / ‖g‖`.
pub fn cgls_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    g: &[T],
    x0: &[T],
    opts: &SolveOptions<'_, T>,
    stop: &StoppingRule<T>,
) -> Result<SolveReport<T>> {
    check_len(a.nrows(), g.len())?;
    check_len(a.ncols(), x0.len())?;
    let mut mon = Monitor::new(opts, g);
    let mut x = x0.to_vec();
    let mut s = residual(a, g, &x);
    let mut r = a.apply_transpose(&s);
    let normal_tol = opts.tol * norm2(&a.apply_transpose(g));
    let satisfied = |s: &[T], r: &[T], x: &[T]| {
        let data = match stop {
            StoppingRule::FixedTol => norm2(r) <= normal_tol,
            StoppingRule::Discrepancy { .. } => stop.is_met(norm2(s) / mon_norm(g)),
        };
        data || opts.stop.is_some_and(|f| f(x))
    };
    mon.record(&x, norm2(&s));
    if satisfied(&s, &r, &x) || norm2(&r) == T::zero() {
        return Ok(mon.finish(x, 0, Termination::Converged));
    }
    let mut p = r.clone();
    let mut gamma = dot(&r, &r);
    let mut q = vec![T::zero(); g.len()];
    let mut termination = Termination::MaxIterations;
    let mut k = 0;
    while k < opts.maxit {
        a.apply_into(&p, &mut q);
        let delta = dot(&q, &q);
        if !(delta > T::zero()) {
            termination = Termination::Stagnation;
            break;
        }
        let alpha = gamma / delta;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut s);
        a.apply_transpose_into(&s, &mut r);
        k += 1;
        mon.record(&x, norm2(&s));
        if satisfied(&s, &r, &x) {
            termination = Termination::Converged;
            break;
        }
        let gamma_new = dot(&r, &r);
        if gamma_new == T::zero() {
            termination = Termination::Converged;
            break;
        }
        let beta = gamma_new / gamma;
        gamma = gamma_new;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    Ok(mon.finish(x, k, termination))
}

fn mon_norm<T: Scalar>(g: &[T]) -> T {
    let n = norm2(g);
    if n > T::zero() {
        n
    } else {
        T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_lu_solve, DenseMatrix, SparseMatrix};
    use crate::splittings::ic0;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tridiag(n: usize) -> SparseMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn pcg_identity_one_iteration() {
        let a = SparseMatrix::<f64>::identity(5);
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let rep = pcg_solve(&a, &b, &[0.0; 5], None, &SolveOptions::new(1e-12, 10)).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.termination, Termination::Converged);
        assert_eq!(rep.solution, b.to_vec());
    }

    #[test]
    fn pcg_finite_termination_and_ic0() {
        let a = tridiag(10);
        let b: Vec<f64> = (0..10).map(|i| 1.0 + (i as f64).sin()).collect();
        let opts = SolveOptions::new(1e-10, 50);
        let plain = pcg_solve(&a, &b, &[0.0; 10], None, &opts).unwrap();
        assert!(plain.iterations <= 10);
        assert_eq!(plain.termination, Termination::Converged);
        let f = ic0(&a).unwrap();
        let pre = pcg_solve(&a, &b, &[0.0; 10], Some(&f), &opts).unwrap();
        assert!(pre.iterations <= plain.iterations);
        let x = dense_lu_solve(&a.to_dense(), &b).unwrap();
        assert!(crate::linalg::rel_diff(&pre.solution, &x) < 1e-9);
    }

    #[test]
    fn pcg_flags_indefinite() {
        let a = SparseMatrix::diagonal(&[1.0, -1.0]);
        let rep = pcg_solve(&a, &[1.0, 1.0], &[0.0; 2], None, &SolveOptions::new(1e-12, 10)).unwrap();
        assert_eq!(rep.termination, Termination::Stagnation);
    }

    #[test]
    fn pcg_history_monotone_in_energy_norm() {
        let a = tridiag(12);
        let b = vec![1.0; 12];
        let xs = dense_lu_solve(&a.to_dense(), &b).unwrap();
        let rep = pcg_solve(&a, &b, &[0.0; 12], None, &SolveOptions::new(1e-12, 30)).unwrap();
        assert_eq!(rep.residuals.len(), rep.iterations + 1);
        assert!(rep.termination.is_success());
        assert!(crate::linalg::rel_diff(&rep.solution, &xs) < 1e-10);
    }

    #[test]
    fn gmres_identity_one_iteration() {
        let a = SparseMatrix::<f64>::identity(4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let rep = gmres_solve(&a, &b, &[0.0; 4], 5, None, &SolveOptions::new(1e-12, 10)).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.termination, Termination::Converged);
    }

    #[test]
    fn gmres_full_krylov_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = DenseMatrix::from_fn(6, 6, |i, j| rng.random::<f64>() - 0.5 + if i == j { 2.0 } else { 0.0 });
        let b: Vec<f64> = (0..6).map(|i| i as f64 - 2.0).collect();
        let rep = gmres_solve(&d, &b, &[0.0; 6], 6, None, &SolveOptions::new(1e-12, 6)).unwrap();
        assert!(rep.iterations <= 6);
        assert_eq!(rep.termination, Termination::Converged);
        let x = dense_lu_solve(&d, &b).unwrap();
        assert!(crate::linalg::rel_diff(&rep.solution, &x) < 1e-9);
    }

    #[test]
    fn gmres_restarted_with_ilu() {
        let mut t = Vec::new();
        let n = 60;
        for i in 0..n {
            t.push((i, i, 3.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.8));
                t.push((i + 1, i, -0.7));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let b = vec![1.0; n];
        let opts = SolveOptions::new(1e-10, 500);
        let plain = gmres_solve(&a, &b, &vec![0.0; n], 5, None, &opts).unwrap();
        assert_eq!(plain.termination, Termination::Converged);
        let f = crate::splittings::ilu0(&a).unwrap();
        let pre = gmres_solve(&a, &b, &vec![0.0; n], 5, Some(&f), &opts).unwrap();
        assert!(pre.iterations <= 2);
        assert!(pre.relative_residual() <= 1e-10);
    }

    #[test]
    fn cgls_identity_and_overdetermined() {
        let a = SparseMatrix::<f64>::identity(3);
        let g = [1.0, 2.0, 3.0];
        let rep = cgls_solve(&a, &g, &[0.0; 3], &SolveOptions::new(1e-12, 10), &StoppingRule::FixedTol).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.solution, g.to_vec());

        let a = DenseMatrix::from_rows(&[
            &[1.0, 2.0, 0.0],
            &[0.0, 1.0, 1.0],
            &[1.0, 0.0, 3.0],
            &[2.0, 1.0, 1.0],
            &[0.5, -1.0, 1.0],
        ])
        .unwrap();
        let g = [1.0, 0.0, 2.0, -1.0, 0.5];
        let rep = cgls_solve(&a, &g, &[0.0; 3], &SolveOptions::new(1e-13, 20), &StoppingRule::FixedTol).unwrap();
        assert!(rep.iterations <= 3 + 1);
        let ata = a.transpose().matmul(&a).unwrap();
        let atg = a.apply_transpose(&g);
        let x = dense_lu_solve(&ata, &atg).unwrap();
        assert!(crate::linalg::rel_diff(&rep.solution, &x) < 1e-8);
    }
}

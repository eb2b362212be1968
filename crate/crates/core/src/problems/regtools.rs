//! Discretizations of first-kind Fredholm integral equations in the style of
//! the classic regularization test sets. Right-hand sides are `A·truth`.

use super::Problem;
use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, SparseMatrix};
use crate::scalar::Scalar;
use std::f64::consts::PI;

fn finish<T: Scalar>(name: &str, n: usize, a: Vec<(usize, usize, f64)>, x: Vec<f64>) -> Result<Problem<T>> {
    let t: Vec<(usize, usize, T)> = a.into_iter().map(|(i, j, v)| (i, j, T::lit(v))).collect();
    let matrix = SparseMatrix::from_triplets(n, n, &t)?;
    let truth: Vec<T> = x.into_iter().map(T::lit).collect();
    let rhs_clean = matrix.apply(&truth);
    Ok(Problem {
        name: name.into(),
        matrix,
        rhs_clean,
        truth: Some(truth),
        params: vec![("n".into(), n.to_string())],
    })
}

fn require_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("problem size must be >= 4, got {n}")));
    }
    Ok(())
}

/// Kernel `√(s² + t²)` on `[0,1]²`, midpoint rule; solution `f(t) = t`.
pub fn foxgood<T: Scalar>(n: usize) -> Result<Problem<T>> {
    require_n(n)?;
    let h = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|i| h * (i as f64 + 0.5)).collect();
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push((i, j, h * (t[i] * t[i] + t[j] * t[j]).sqrt()));
        }
    }
    finish("foxgood", n, a, t)
}

/// Gravity surveying with mass at depth `d = 0.25`:
/// kernel `d (d² + (s - t)²)^{-3/2}`; solution `sin(πt) + sin(2πt)/2`.
pub fn gravity<T: Scalar>(n: usize) -> Result<Problem<T>> {
    require_n(n)?;
    let d = 0.25;
    let h = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|i| h * (i as f64 + 0.5)).collect();
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let st = t[i] - t[j];
            a.push((i, j, h * d / (d * d + st * st).powf(1.5)));
        }
    }
    let x = t.iter().map(|&s| (PI * s).sin() + 0.5 * (2.0 * PI * s).sin()).collect();
    finish("gravity", n, a, x)
}

/// Phillips' problem on `[-6, 6]`: kernel `φ(s - t)` with
/// `φ(x) = 1 + cos(πx/3)` for `|x| < 3`, zero otherwise, Galerkin
/// discretization with box functions. Banded symmetric Toeplitz.
pub fn phillips<T: Scalar>(n: usize) -> Result<Problem<T>> {
    require_n(n)?;
    if n % 4 != 0 {
        return Err(Error::InvalidParameter(format!("phillips needs n divisible by 4, got {n}")));
    }
    let h = 12.0 / n as f64;
    let n4 = n / 4;
    let c: Vec<f64> = (0..n4 + 2).map(|k| ((k as f64 - 1.0) * 4.0 * PI / n as f64).cos()).collect();
    let mut r1 = vec![0.0; n];
    let w = 9.0 / (h * PI * PI);
    for k in 0..n4 {
        r1[k] = h + w * (c[k + 2] - 2.0 * c[k + 1] + c[k]);
    }
    r1[n4] = h / 2.0 + w * ((4.0 * PI / n as f64).cos() - 1.0);
    let mut a = Vec::new();
    for i in 0..n {
        let lo = i.saturating_sub(n4);
        for j in lo..(i + n4 + 1).min(n) {
            a.push((i, j, r1[i.abs_diff(j)]));
        }
    }
    // cell averages of 1 + cos(πt/3) over [0, 3], mirrored to [-3, 0]
    let mut x = vec![0.0; n];
    let cc = PI / 3.0;
    for k in 0..n4 {
        let (t0, t1) = (k as f64 * h, (k + 1) as f64 * h);
        x[2 * n4 + k] = (h + ((cc * t1).sin() - (cc * t0).sin()) / cc) / h.sqrt();
    }
    for k in 0..n4 {
        x[n4 + k] = x[3 * n4 - 1 - k];
    }
    finish("phillips", n, a, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{svd, sym_eigs_dense};

    #[test]
    fn symmetric() {
        for p in [foxgood::<f64>(32).unwrap(), gravity(32).unwrap(), phillips(32).unwrap()] {
            let scale = p.matrix.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(p.matrix.asymmetry() <= 1e-12 * scale, "{}", p.name);
        }
    }

    #[test]
    fn phillips_is_banded() {
        let p = phillips::<f64>(900).unwrap();
        let (kl, ku) = p.matrix.bandwidths();
        assert_eq!((kl, ku), (225, 225));
        // kernel support |s - t| < 6 out of a domain of length 12
        assert!(p.matrix.nnz() < 900 * 900 / 2);
        assert!(p.matrix.nnz() <= 355050);
    }

    #[test]
    fn phillips_rejects_bad_n() {
        assert!(phillips::<f64>(30).is_err());
        assert!(foxgood::<f64>(3).is_err());
    }

    #[test]
    fn phillips_solution_shape() {
        let p = phillips::<f64>(64).unwrap();
        let x = p.truth.unwrap();
        assert!(x[..16].iter().all(|&v| v == 0.0) && x[48..].iter().all(|&v| v == 0.0));
        for k in 0..16 {
            assert_eq!(x[16 + k], x[47 - k]);
        }
        // peak of 1 + cos at the centre: cell average close to 2, scaled by 1/√h
        let h: f64 = 12.0 / 64.0;
        assert!((x[32] * h.sqrt() / h - 2.0).abs() < 0.05);
    }

    #[test]
    fn rhs_is_a_times_truth() {
        for p in [foxgood::<f64>(40).unwrap(), gravity(40).unwrap()] {
            let x = p.truth.as_ref().unwrap();
            let r: Vec<f64> = p.matrix.apply(x).iter().zip(&p.rhs_clean).map(|(a, b)| a - b).collect();
            assert!(crate::linalg::norm2(&r) <= 1e-10 * crate::linalg::norm2(&p.rhs_clean));
        }
    }

    #[test]
    fn foxgood_ill_conditioned() {
        let p = foxgood::<f64>(64).unwrap();
        let s = svd(&p.matrix.to_dense()).s;
        let cond = s[0] / s[s.len() - 1].max(f64::MIN_POSITIVE);
        assert!(cond > 1e15, "cond {cond:e}");
    }

    #[test]
    fn gravity_positive_semidefinite_trend() {
        let p = gravity::<f64>(24).unwrap();
        let e = sym_eigs_dense(&p.matrix.to_dense()).unwrap();
        assert!(e[e.len() - 1] > 0.0);
    }

    #[test]
    fn deterministic() {
        let a = phillips::<f64>(16).unwrap();
        let b = phillips::<f64>(16).unwrap();
        assert_eq!(a.matrix.values(), b.matrix.values());
        assert_eq!(a.truth, b.truth);
    }
}

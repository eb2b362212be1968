use super::Problem;
use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, SparseMatrix};
use crate::scalar::Scalar;

/// Convection coefficients `(a, b)` of `-Δu + a u_x + b u_y = f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvDiffCase {
    /// `a = x sin(x + y)`, `b = y cos(xy)`.
    I,
    /// `a = 5y exp(xy)`, `b = 5x exp(x + y)`.
    II,
    /// `a = b = 0`: the 5-point Laplacian.
    Diffusion,
}

impl ConvDiffCase {
    fn coefficients(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            ConvDiffCase::I => (x * (x + y).sin(), y * (x * y).cos()),
            ConvDiffCase::II => (5.0 * y * (x * y).exp(), 5.0 * x * (x + y).exp()),
            ConvDiffCase::Diffusion => (0.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConvDiffCase::I => "I",
            ConvDiffCase::II => "II",
            ConvDiffCase::Diffusion => "diffusion",
        }
    }
}

/// Scaling of the difference equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvDiffScaling {
    /// Difference quotients as written: `(4u - Σ neighbors)/h² + a(u_E - u_W)/(2h) + ...`.
    DividedByH2,
    /// The same equations multiplied by `h²`: stencil `4, -1 ± a h/2`.
    TimesH2,
}

/// Central-difference convection–diffusion on the unit square with mesh
/// `h = 1/l`, zero Dirichlet data and lexicographic ordering (x fastest).
/// The matrix has order `(l - 1)²`; the right-hand side is `A·1`. Benchmarks
/// use a random solution via [`Problem::with_random_truth`]: the smooth
/// all-ones solution drives TSTMR into a slow regime on case II.
pub fn convdiff2d<T: Scalar>(l: usize, case: ConvDiffCase) -> Result<Problem<T>> {
    convdiff2d_scaled(l, case, ConvDiffScaling::TimesH2)
}

pub fn convdiff2d_scaled<T: Scalar>(l: usize, case: ConvDiffCase, scaling: ConvDiffScaling) -> Result<Problem<T>> {
    if l < 3 {
        return Err(Error::InvalidParameter(format!("convdiff2d needs l >= 3, got {l}")));
    }
    let m = l - 1;
    let n = m * m;
    let h = 1.0 / l as f64;
    let (diff, conv) = match scaling {
        ConvDiffScaling::DividedByH2 => (1.0 / (h * h), 1.0 / (2.0 * h)),
        ConvDiffScaling::TimesH2 => (1.0, h / 2.0),
    };
    let mut t = Vec::with_capacity(5 * n);
    for j in 0..m {
        for i in 0..m {
            let p = j * m + i;
            let (a, b) = case.coefficients((i + 1) as f64 * h, (j + 1) as f64 * h);
            t.push((p, p, T::lit(4.0 * diff)));
            if i > 0 {
                t.push((p, p - 1, T::lit(-diff - a * conv)));
            }
            if i + 1 < m {
                t.push((p, p + 1, T::lit(-diff + a * conv)));
            }
            if j > 0 {
                t.push((p, p - m, T::lit(-diff - b * conv)));
            }
            if j + 1 < m {
                t.push((p, p + m, T::lit(-diff + b * conv)));
            }
        }
    }
    let matrix = SparseMatrix::from_triplets(n, n, &t)?;
    let rhs_clean = matrix.apply(&vec![T::one(); n]);
    Ok(Problem {
        name: format!("convdiff-{}", case.name()),
        matrix,
        rhs_clean,
        truth: Some(vec![T::one(); n]),
        params: vec![
            ("l".into(), l.to_string()),
            ("case".into(), case.name().into()),
            (
                "scaling".into(),
                match scaling {
                    ConvDiffScaling::DividedByH2 => "divided",
                    ConvDiffScaling::TimesH2 => "times_h2",
                }
                .into(),
            ),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{lanczos_extreme, split_hs};

    #[test]
    fn sizes_and_nonzeros() {
        let p = convdiff2d::<f64>(4, ConvDiffCase::I).unwrap();
        assert_eq!(p.matrix.nrows(), 9);
        assert_eq!(p.matrix.nnz(), 33);
        let p = convdiff2d::<f64>(80, ConvDiffCase::II).unwrap();
        assert_eq!(p.matrix.nrows(), 6241);
        assert!(convdiff2d::<f64>(2, ConvDiffCase::I).is_err());
    }

    #[test]
    fn diffusion_is_symmetric() {
        for s in [ConvDiffScaling::DividedByH2, ConvDiffScaling::TimesH2] {
            let p = convdiff2d_scaled::<f64>(6, ConvDiffCase::Diffusion, s).unwrap();
            let (_, sk) = split_hs(&p.matrix).unwrap();
            assert!(sk.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn scalings_differ_by_h2() {
        let a = convdiff2d_scaled::<f64>(5, ConvDiffCase::II, ConvDiffScaling::DividedByH2).unwrap();
        let b = convdiff2d_scaled::<f64>(5, ConvDiffCase::II, ConvDiffScaling::TimesH2).unwrap();
        let d = a.matrix.scaled(1.0 / 25.0).linear_combination(1.0, &b.matrix, -1.0).unwrap();
        assert!(d.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn stencil_entries_by_hand() {
        // l = 4, h = 1/4, node (1, 1) at (0.25, 0.25), case II, h²-scaled
        let p = convdiff2d::<f64>(4, ConvDiffCase::II).unwrap();
        let (x, y, h) = (0.25f64, 0.25f64, 0.25f64);
        let a = 5.0 * y * (x * y).exp();
        let b = 5.0 * x * (x + y).exp();
        assert_eq!(p.matrix.get(0, 0), 4.0);
        assert!((p.matrix.get(0, 1) - (-1.0 + a * h / 2.0)).abs() < 1e-15);
        assert!((p.matrix.get(0, 3) - (-1.0 + b * h / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_part_positive_definite() {
        for case in [ConvDiffCase::I, ConvDiffCase::II] {
            let p = convdiff2d::<f64>(32, case).unwrap();
            let (h, _) = split_hs(&p.matrix).unwrap();
            let (lo, _) = lanczos_extreme(&h, 200, 1);
            assert!(lo > 0.0, "case {case:?}: {lo}");
        }
    }

    #[test]
    fn deterministic() {
        let a = convdiff2d::<f64>(10, ConvDiffCase::I).unwrap();
        let b = convdiff2d::<f64>(10, ConvDiffCase::I).unwrap();
        assert_eq!(a.matrix.values(), b.matrix.values());
    }
}

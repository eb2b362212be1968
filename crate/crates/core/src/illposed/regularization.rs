use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, svd, DenseCholesky, DenseMatrix, LinearOperator};
use crate::scalar::Scalar;

/// Tikhonov solution from the normal equations `(AᵀA + μ²I) f = Aᵀg`.
pub fn tikhonov_direct<T: Scalar>(a: &DenseMatrix<T>, g: &[T], mu: T) -> Result<Vec<T>> {
    check_len(a.nrows(), g.len())?;
    let ata = a.transpose().matmul(a)?;
    let shifted = ata.add_scaled(T::one(), &DenseMatrix::identity(a.ncols()), mu * mu)?;
    let chol = DenseCholesky::new(&shifted)?;
    Ok(chol.solve(&a.apply_transpose(g)))
}

/// GCV choice of `μ` over 200 log-spaced points in `[1e-10, 1]·σ₁`.
pub fn gcv_select_mu<T: Scalar>(a: &DenseMatrix<T>, g: &[T]) -> Result<T> {
    gcv_select_mu_grid(a, g, 200, T::lit(1e-10), T::one())
}

/// GCV minimizer over `points` log-spaced values in `[lo, hi]·σ₁`.
///
/// `G(μ) = ‖g - A f_μ‖² / (m - Σ fᵢ)²` with filter factors
/// `fᵢ = σᵢ² / (σᵢ² + μ²)`.
pub fn gcv_select_mu_grid<T: Scalar>(a: &DenseMatrix<T>, g: &[T], points: usize, lo: T, hi: T) -> Result<T> {
    check_len(a.nrows(), g.len())?;
    if points == 0 || !(lo > T::zero()) || !(hi >= lo) {
        return Err(Error::InvalidParameter("GCV grid needs points >= 1 and 0 < lo <= hi".into()));
    }
    let dec = svd(a);
    let s1 = dec.s.first().copied().unwrap_or_else(T::zero);
    if s1 == T::zero() {
        return Ok(T::zero());
    }
    let beta: Vec<T> = (0..dec.s.len())
        .map(|i| {
            (0..a.nrows()).map(|r| dec.u[(r, i)] * g[r]).sum::<T>()
        })
        .collect();
    let bb: T = beta.iter().map(|&b| b * b).sum();
    let perp = (norm2(g).powi(2) - bb).max(T::zero());
    let m = T::lit(a.nrows() as f64);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut best = (T::infinity(), lo * s1);
    for p in 0..points {
        let t = if points == 1 {
            T::zero()
        } else {
            T::lit(p as f64 / (points - 1) as f64)
        };
        let mu = (llo + t * (lhi - llo)).exp() * s1;
        let mu2 = mu * mu;
        let (mut res, mut tr) = (perp, T::zero());
        for (&s, &b) in dec.s.iter().zip(&beta) {
            let d = s * s + mu2;
            res += (mu2 / d * b).powi(2);
            tr += s * s / d;
        }
        let val = res / (m - tr).powi(2);
        if val < best.0 {
            best = (val, mu);
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel<T> {
    /// Adds `scale·u`, `u` uniform on `[0, 1)` per entry.
    UniformAbsolute(T),
    /// Adds gaussian noise rescaled to `‖e‖ / ‖g‖ = level` exactly.
    GaussianRelative(T),
}

/// Deterministic noisy copy of `g_clean`.
pub fn add_noise<T: Scalar>(g_clean: &[T], model: NoiseModel<T>, seed: u64) -> Result<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model {
        NoiseModel::UniformAbsolute(scale) => {
            if !(scale >= T::zero()) {
                return Err(Error::InvalidParameter(format!("noise scale must be >= 0, got {scale}")));
            }
            Ok(g_clean
                .iter()
                .map(|&v| v + scale * T::lit(rng.random::<f64>()))
                .collect())
        }
        NoiseModel::GaussianRelative(level) => {
            if !(level >= T::zero()) {
                return Err(Error::InvalidParameter(format!("noise level must be >= 0, got {level}")));
            }
            if level == T::zero() {
                return Ok(g_clean.to_vec());
            }
            let e: Vec<f64> = (0..g_clean.len()).map(|_| rng.sample(StandardNormal)).collect();
            let en: f64 = e.iter().map(|v| v * v).sum::<f64>().sqrt();
            let target = level.as_f64() * norm2(g_clean).as_f64();
            let k = if en > 0.0 { target / en } else { 0.0 };
            Ok(g_clean.iter().zip(&e).map(|(&v, &ei)| v + T::lit(k * ei)).collect())
        }
    }
}

/// When an iteration for an ill-posed problem stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingRule<T> {
    /// The solver's own residual tolerance.
    FixedTol,
    /// Discrepancy principle: `‖g - Af‖ / ‖g‖ ≤ safety · noise_level`.
    Discrepancy { noise_level: T, safety: T },
}

impl<T: Scalar> StoppingRule<T> {
    /// Discrepancy rule with the customary safety factor 1.01.
    pub fn discrepancy(noise_level: T) -> Self {
        StoppingRule::Discrepancy {
            noise_level,
            safety: T::lit(1.01),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let StoppingRule::Discrepancy { noise_level, safety } = *self {
            if !(safety >= T::one()) || !(noise_level >= T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "discrepancy rule needs safety >= 1 and noise level >= 0 (got {safety}, {noise_level})"
                )));
            }
        }
        Ok(())
    }

    /// Whether a relative data residual meets the rule; always false for `FixedTol`.
    pub fn is_met(&self, relres: T) -> bool {
        discrepancy_stop(relres, self)
    }
}

pub fn discrepancy_stop<T: Scalar>(relres: T, rule: &StoppingRule<T>) -> bool {
    match *rule {
        StoppingRule::FixedTol => false,
        StoppingRule::Discrepancy { noise_level, safety } => {
            // tolerate rounding in the product at the boundary
            relres <= safety * noise_level * (T::one() + T::epsilon() * T::lit(4.0))
        }
    }
}

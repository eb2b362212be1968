//! Test-problem generators and image utilities.

mod blur;
mod convdiff;
mod image;
mod regtools;

pub use blur::{blur_image, mblur, mblur_image_operator};
pub use convdiff::{convdiff2d, convdiff2d_scaled, ConvDiffCase, ConvDiffScaling};
pub use image::{psnr, read_pgm, synthetic_image, write_pgm, GrayImage};
pub use regtools::{foxgood, gravity, phillips};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{LinearOperator, SparseMatrix};
use crate::scalar::Scalar;

/// A generated linear system with its clean right-hand side and, when known,
/// the exact solution.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    pub name: String,
    pub matrix: SparseMatrix<T>,
    pub rhs_clean: Vec<T>,
    pub truth: Option<Vec<T>>,
    pub params: Vec<(String, String)>,
}

impl<T: Scalar> Problem<T> {
    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    /// Replaces the solution by a uniform random vector on `[0, 1)` and sets
    /// `rhs_clean = A·truth`.
    pub fn with_random_truth(mut self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<T> = (0..self.n()).map(|_| T::lit(rng.random::<f64>())).collect();
        self.rhs_clean = self.matrix.apply(&x);
        self.truth = Some(x);
        self.params.push(("truth_seed".into(), seed.to_string()));
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

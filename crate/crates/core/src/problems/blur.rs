use super::GrayImage;
use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, SparseMatrix};
use crate::scalar::Scalar;

/// One-dimensional motion blur: banded Toeplitz with `2·bandw - 1` equal
/// weights `1/(2·bandw - 1)`, truncated (not renormalized) at the ends.
pub fn mblur<T: Scalar>(n: usize, bandw: usize) -> Result<SparseMatrix<T>> {
    if bandw == 0 || bandw > n {
        return Err(Error::InvalidParameter(format!("mblur needs 1 <= bandw <= n (bandw {bandw}, n {n})")));
    }
    let w = T::one() / T::lit((2 * bandw - 1) as f64);
    let mut t = Vec::with_capacity(n * (2 * bandw - 1));
    for i in 0..n {
        let lo = i.saturating_sub(bandw - 1);
        for j in lo..(i + bandw).min(n) {
            t.push((i, j, w));
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

/// Blur acting along the rows of a row-major `width × height` image:
/// `I_height ⊗ mblur(width)`.
pub fn mblur_image_operator<T: Scalar>(width: usize, height: usize, bandw: usize) -> Result<SparseMatrix<T>> {
    let row = mblur(width, bandw)?;
    Ok(SparseMatrix::identity(height).kron(&row))
}

/// Blurred copy of an image (values may leave `[0, 1]` only through rounding
/// and are clamped).
pub fn blur_image(img: &GrayImage, bandw: usize) -> Result<GrayImage> {
    let op = mblur_image_operator::<f64>(img.width(), img.height(), bandw)?;
    GrayImage::new(img.width(), img.height(), op.apply(img.pixels()))
}

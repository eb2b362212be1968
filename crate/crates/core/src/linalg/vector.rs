//! Dense vectors and level-1 kernels.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::ops::{Deref, DerefMut};

/// Owned vector whose entries are all finite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    /// Wraps `values`, rejecting NaN and infinite entries.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn norm(&self) -> T {
        norm2(&self.0)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Vector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for Vector<T> {
    type Error = Error;
    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

#[inline]
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Euclidean norm, scaled to avoid overflow and underflow.
pub fn norm2<T: Scalar>(x: &[T]) -> T {
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s = x
        .iter()
        .map(|&v| {
            let t = v / scale;
            t * t
        })
        .sum::<T>();
    scale * s.sqrt()
}

/// y += a * x
#[inline]
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn scale<T: Scalar>(a: T, x: &mut [T]) {
    for v in x {
        *v *= a;
    }
}

/// x - y
pub fn sub<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn add<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a + b).collect()
}

/// ‖x - y‖ / ‖y‖, or ‖x‖ when `y` is zero.
pub fn rel_diff<T: Scalar>(x: &[T], y: &[T]) -> T {
    let d = norm2(&sub(x, y));
    let ny = norm2(y);
    if ny > T::zero() {
        d / ny
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert!(Vector::new(vec![0.0f32, f32::INFINITY]).is_err());
        assert!(Vector::new(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn norm_survives_extreme_scales() {
        let big = vec![1e200, 1e200];
        assert!((norm2(&big) / (2f64.sqrt() * 1e200) - 1.0).abs() < 1e-15);
        let tiny: Vec<f64> = vec![3e-200, 4e-200];
        assert!((norm2(&tiny) / 5e-200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2::<f64>(&[]), 0.0);
    }

    #[test]
    fn axpy_and_dot() {
        let mut y = vec![1.0, 1.0];
        axpy(2.0, &[1.0, -1.0], &mut y);
        assert_eq!(y, vec![3.0, -1.0]);
        assert_eq!(dot(&y, &[1.0, 1.0]), 2.0);
    }
}

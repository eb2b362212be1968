//! Matrix-free linear operators.

use crate::linalg::vector::{axpy, dot};
use crate::scalar::Scalar;

/// A dimension-tagged linear map with a transpose.
///
/// `apply_into` and `apply_transpose_into` panic on mismatched slice
/// lengths; fallible entry points live on the concrete matrix types.
pub trait LinearOperator<T: Scalar> {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply_into(&self, x: &[T], y: &mut [T]);
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]);

    fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows()];
        self.apply_into(x, &mut y);
        y
    }

    fn apply_transpose(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.ncols()];
        self.apply_transpose_into(x, &mut y);
        y
    }

    fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for &O {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_into(x, y)
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_transpose_into(x, y)
    }
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for Box<O> {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_into(x, y)
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_transpose_into(x, y)
    }
}

/// b - A x
pub fn residual<T: Scalar, O: LinearOperator<T> + ?Sized>(op: &O, b: &[T], x: &[T]) -> Vec<T> {
    let mut r = op.apply(x);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    r
}

#[derive(Debug, Clone, Copy)]
pub struct Identity {
    pub n: usize,
}

impl<T: Scalar> LinearOperator<T> for Identity {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(x);
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(x);
    }
}

/// `scale * op + shift * I` for square `op`.
#[derive(Debug, Clone)]
pub struct Shifted<O, T> {
    pub op: O,
    pub scale: T,
    pub shift: T,
}

impl<T: Scalar, O: LinearOperator<T>> LinearOperator<T> for Shifted<O, T> {
    fn nrows(&self) -> usize {
        self.op.nrows()
    }
    fn ncols(&self) -> usize {
        self.op.ncols()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        self.op.apply_into(x, y);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.scale * *yi + self.shift * xi;
        }
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        self.op.apply_transpose_into(x, y);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.scale * *yi + self.shift * xi;
        }
    }
}

/// `Aᵀ A + shift * I`, never formed.
#[derive(Debug, Clone)]
pub struct NormalOperator<O, T> {
    pub op: O,
    pub shift: T,
}

impl<T: Scalar, O: LinearOperator<T>> LinearOperator<T> for NormalOperator<O, T> {
    fn nrows(&self) -> usize {
        self.op.ncols()
    }
    fn ncols(&self) -> usize {
        self.op.ncols()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        let ax = self.op.apply(x);
        self.op.apply_transpose_into(&ax, y);
        axpy(self.shift, x, y);
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        self.apply_into(x, y)
    }
}

/// Transposed view of an operator.
#[derive(Debug, Clone)]
pub struct Transposed<O>(pub O);

impl<T: Scalar, O: LinearOperator<T>> LinearOperator<T> for Transposed<O> {
    fn nrows(&self) -> usize {
        self.0.ncols()
    }
    fn ncols(&self) -> usize {
        self.0.nrows()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        self.0.apply_transpose_into(x, y)
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        self.0.apply_into(x, y)
    }
}

/// Symmetric operator defined by a closure.
pub struct SymmetricFn<F> {
    pub n: usize,
    pub f: F,
}

impl<T: Scalar, F: Fn(&[T], &mut [T])> LinearOperator<T> for SymmetricFn<F> {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (self.f)(x, y)
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        (self.f)(x, y)
    }
}

/// ⟨A x, y⟩ - ⟨x, Aᵀ y⟩ relative to ‖A x‖‖y‖; used by adjoint checks.
pub fn adjoint_mismatch<T: Scalar, O: LinearOperator<T> + ?Sized>(op: &O, x: &[T], y: &[T]) -> T {
    let ax = op.apply(x);
    let aty = op.apply_transpose(y);
    let lhs = dot(&ax, y);
    let rhs = dot(x, &aty);
    let scale = crate::linalg::norm2(&ax) * crate::linalg::norm2(y)
        + crate::linalg::norm2(x) * crate::linalg::norm2(&aty);
    if scale > T::zero() {
        (lhs - rhs).abs() / scale
    } else {
        T::zero()
    }
}

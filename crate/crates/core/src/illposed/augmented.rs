use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, LinearOperator, NormalOperator};
use crate::scalar::Scalar;
use crate::solvers::{cg_kernel, gmres_kernel};
use crate::splittings::{DiagonalSolver, SplittingPair, SubSolver, SubSolverMode};

/// The augmented operator `K = [[I, A], [-Aᵀ, μ²I]]` acting on `(e; f)` with
/// `e ∈ R^m`, `f ∈ R^n`. `K` is applied through products with `A` only.
#[derive(Debug, Clone)]
pub struct AugmentedSystem<O, T> {
    a: O,
    mu: T,
    gamma: T,
}

impl<T: Scalar, O: LinearOperator<T>> AugmentedSystem<O, T> {
    /// `gamma` is the scalar of the `Ω = blkdiag(I, γI)` shift used by the splittings.
    pub fn new(a: O, mu: T, gamma: T) -> Result<Self> {
        if !(mu >= T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
        }
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self { a, mu, gamma })
    }

    pub fn a(&self) -> &O {
        &self.a
    }
    pub fn mu(&self) -> T {
        self.mu
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    /// Rows of `A` (length of the `e` block).
    pub fn m(&self) -> usize {
        self.a.nrows()
    }
    /// Columns of `A` (length of the `f` block).
    pub fn n(&self) -> usize {
        self.a.ncols()
    }
    pub fn dim(&self) -> usize {
        self.m() + self.n()
    }

    /// Right-hand side `(g; 0)`.
    pub fn rhs(&self, g: &[T]) -> Result<Vec<T>> {
        check_len(self.m(), g.len())?;
        let mut b = g.to_vec();
        b.resize(self.dim(), T::zero());
        Ok(b)
    }

    /// The `f` block of an augmented vector.
    pub fn f_block<'v>(&self, x: &'v [T]) -> &'v [T] {
        &x[self.m()..]
    }

    /// `K v = (v₁ + A v₂; -Aᵀv₁ + μ²v₂)`.
    pub fn k_apply(&self, v: &[T]) -> Result<Vec<T>> {
        check_len(self.dim(), v.len())?;
        Ok(self.apply(v))
    }

    /// `H(K)⁻¹ v = (v₁; v₂/μ²)`.
    pub fn hk_inv_apply(&self, v: &[T]) -> Result<Vec<T>> {
        check_len(self.dim(), v.len())?;
        if self.mu == T::zero() {
            return Err(Error::InvalidParameter("H(K) is singular for mu = 0".into()));
        }
        let mu2 = self.mu * self.mu;
        let m = self.m();
        Ok(v.iter().enumerate().map(|(i, &x)| if i < m { x } else { x / mu2 }).collect())
    }

    /// `H(K) = blkdiag(I, μ²I)` as a diagonal sub-solver.
    pub fn hk_solver(&self) -> Result<DiagonalSolver<T>> {
        let mut d = vec![T::one(); self.m()];
        d.extend(std::iter::repeat_n(self.mu * self.mu, self.n()));
        DiagonalSolver::new(&d).map_err(|_| Error::InvalidParameter("H(K) is singular for mu = 0".into()))
    }
}

fn apply_block<T: Scalar, O: LinearOperator<T>>(a: &O, shift: T, sign: T, x: &[T], y: &mut [T]) {
    let m = a.nrows();
    let (x1, x2) = x.split_at(m);
    let (y1, y2) = y.split_at_mut(m);
    a.apply_into(x2, y1);
    for (yi, &xi) in y1.iter_mut().zip(x1) {
        *yi = xi + sign * *yi;
    }
    a.apply_transpose_into(x1, y2);
    for (yi, &xi) in y2.iter_mut().zip(x2) {
        *yi = shift * xi - sign * *yi;
    }
}

impl<T: Scalar, O: LinearOperator<T>> LinearOperator<T> for AugmentedSystem<O, T> {
    fn nrows(&self) -> usize {
        self.dim()
    }
    fn ncols(&self) -> usize {
        self.dim()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim(), "augmented operator: input length");
        assert_eq!(y.len(), self.dim(), "augmented operator: output length");
        apply_block(&self.a, self.mu * self.mu, T::one(), x, y)
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim(), "augmented operator: input length");
        assert_eq!(y.len(), self.dim(), "augmented operator: output length");
        apply_block(&self.a, self.mu * self.mu, -T::one(), x, y)
    }
}

/// `M̂ = Ω + S(K) = [[I, A], [-Aᵀ, γI]]` as an operator.
#[derive(Debug, Clone)]
pub struct OmegaSkewOperator<'s, O, T> {
    pub a: &'s O,
    pub gamma: T,
}

impl<T: Scalar, O: LinearOperator<T>> LinearOperator<T> for OmegaSkewOperator<'_, O, T> {
    fn nrows(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }
    fn ncols(&self) -> usize {
        self.nrows()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        apply_block(self.a, self.gamma, T::one(), x, y)
    }
    fn apply_transpose_into(&self, x: &[T], y: &mut [T]) {
        apply_block(self.a, self.gamma, -T::one(), x, y)
    }
}

/// Inner iteration for `(Ω + S(K)) x = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaInner<T> {
    /// CG on the Schur complement `(γI + AᵀA) x₂ = b₂ + Aᵀb₁`.
    SchurCg { tol: T, maxit: usize },
    /// Unrestarted GMRES on the block system.
    BlockGmres { tol: T, maxit: usize },
}

/// Applies `(Ω + S(K))⁻¹` approximately, with `Ω = blkdiag(I, γI)`.
pub struct OmegaSkewSolver<'s, O, T> {
    a: &'s O,
    gamma: T,
    inner: OmegaInner<T>,
}

impl<'s, T: Scalar, O: LinearOperator<T>> OmegaSkewSolver<'s, O, T> {
    pub fn new(a: &'s O, gamma: T, inner: OmegaInner<T>) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self { a, gamma, inner })
    }
}

impl<T: Scalar, O: LinearOperator<T>> SubSolver<T> for OmegaSkewSolver<'_, O, T> {
    fn dim(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }

    fn mode(&self) -> SubSolverMode {
        SubSolverMode::InnerIterative
    }

    fn apply_into(&self, b: &[T], out: &mut [T]) {
        let m = self.a.nrows();
        out.fill(T::zero());
        match self.inner {
            OmegaInner::SchurCg { tol, maxit } => {
                let (b1, b2) = b.split_at(m);
                let mut rhs = self.a.apply_transpose(b1);
                for (ri, &bi) in rhs.iter_mut().zip(b2) {
                    *ri += bi;
                }
                let schur = NormalOperator {
                    op: self.a,
                    shift: self.gamma,
                };
                let (x1, x2) = out.split_at_mut(m);
                let tol_abs = tol * norm2(&rhs);
                cg_kernel(&schur, &rhs, x2, None, tol_abs, maxit, &mut |_, _| false);
                self.a.apply_into(x2, x1);
                for (xi, &bi) in x1.iter_mut().zip(b1) {
                    *xi = bi - *xi;
                }
            }
            OmegaInner::BlockGmres { tol, maxit } => {
                let op = OmegaSkewOperator {
                    a: self.a,
                    gamma: self.gamma,
                };
                let tol_abs = tol * norm2(b);
                gmres_kernel(&op, b, out, None, maxit.max(1), tol_abs, maxit, &mut |_, _| false);
            }
        }
    }
}

/// `M̃ = H(K)`, `M̂ = Ω + S(K)` for the regularized augmented system.
pub fn build_regularized_split<'s, T: Scalar, O: LinearOperator<T>>(
    sys: &'s AugmentedSystem<O, T>,
    inner: OmegaInner<T>,
) -> Result<SplittingPair<'s, T>> {
    if sys.mu() == T::zero() {
        return Err(Error::InvalidParameter("regularized split needs mu > 0".into()));
    }
    let mu2 = sys.mu() * sys.mu();
    if !(sys.gamma() > mu2) {
        return Err(Error::InvalidParameter(format!(
            "regularized split needs gamma > mu^2 (gamma {}, mu^2 {})",
            sys.gamma(),
            mu2
        )));
    }
    Ok(SplittingPair::new(
        sys.hk_solver()?,
        OmegaSkewSolver::new(sys.a(), sys.gamma(), inner)?,
        format!("H(K) / Omega+S(K), mu={} gamma={}", sys.mu(), sys.gamma()),
    ))
}

/// `M̃ = I`, `M̂ = Ω + S(K₀)` for the non-regularized system `K₀` (μ = 0).
pub fn build_nonregularized_split<'s, T: Scalar, O: LinearOperator<T>>(
    a: &'s O,
    gamma: T,
    inner: OmegaInner<T>,
) -> Result<SplittingPair<'s, T>> {
    let n = a.nrows() + a.ncols();
    Ok(SplittingPair::new(
        DiagonalSolver::identity(n),
        OmegaSkewSolver::new(a, gamma, inner)?,
        format!("I / Omega+S(K0), gamma={gamma}"),
    ))
}

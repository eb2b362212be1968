//! Iterative solvers: two-step minimal residual methods, stationary two-step
//! iterations, and the Krylov baselines.

mod cgw;
mod contraction;
mod krylov;
mod stationary;
mod two_step;

pub use cgw::cgw_solve;
pub use contraction::{contraction_constants, residual_bound_factor, ContractionConstants};
pub use krylov::{cgls_solve, gmres_solve, pcg_solve};
pub use stationary::{hss_solve, mshss_alpha_star, mshss_solve, stationary_two_step_solve, MshssParams};
pub use two_step::{
    tstmr_solve, two_step_1d_mr_solve, HalfStepKind, HalfStepRecord, SearchDim, StepStatus,
    TwoStepMr,
};

pub(crate) use krylov::{cg_kernel, gmres_kernel};

use crate::linalg::{norm2, rel_diff};
use crate::scalar::Scalar;

/// User-supplied stopping test evaluated on the current iterate.
pub type StopFn<'a, T> = &'a (dyn Fn(&[T]) -> bool + Sync);

#[derive(Clone, Copy)]
pub struct SolveOptions<'a, T> {
    /// Relative residual tolerance `‖b - Ax‖ ≤ tol ‖b‖`.
    pub tol: T,
    pub maxit: usize,
    /// Keep per-iteration residual and error histories (otherwise only the
    /// initial and final values).
    pub record_history: bool,
    /// Seed for any randomized internals (spectral estimates).
    pub seed: u64,
    /// Reference solution for relative error histories.
    pub truth: Option<&'a [T]>,
    /// Extra stopping test, checked alongside the residual tolerance.
    pub stop: Option<StopFn<'a, T>>,
}

impl<'a, T: Scalar> SolveOptions<'a, T> {
    pub fn new(tol: T, maxit: usize) -> Self {
        Self {
            tol,
            maxit,
            record_history: true,
            seed: 0,
            truth: None,
            stop: None,
        }
    }

    pub fn with_truth(mut self, truth: &'a [T]) -> Self {
        self.truth = Some(truth);
        self
    }

    pub fn with_stop(mut self, stop: StopFn<'a, T>) -> Self {
        self.stop = Some(stop);
        self
    }

    pub fn with_history(mut self, record: bool) -> Self {
        self.record_history = record;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl<T> std::fmt::Debug for SolveOptions<'_, T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolveOptions")
            .field("tol", &self.tol)
            .field("maxit", &self.maxit)
            .field("record_history", &self.record_history)
            .field("seed", &self.seed)
            .field("truth", &self.truth.is_some())
            .field("stop", &self.stop.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    LuckyBreakdown,
    Stagnation,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::LuckyBreakdown => "lucky_breakdown",
            Termination::Stagnation => "stagnation",
        }
    }

    /// Whether the returned iterate meets the stopping test.
    pub fn is_success(self) -> bool {
        matches!(self, Termination::Converged | Termination::LuckyBreakdown)
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    /// `‖r‖` at the start and after every completed iteration.
    pub residuals: Vec<T>,
    /// `‖r‖` after the first half of every iteration (two-step methods only).
    pub half_step_residuals: Vec<T>,
    /// `‖x - x_true‖ / ‖x_true‖`, aligned with `residuals` when a truth is given.
    pub rel_errors: Vec<T>,
    pub termination: Termination,
    /// `‖b‖`, the scale for relative residuals.
    pub rhs_norm: T,
}

impl<T: Scalar> SolveReport<T> {
    pub fn final_residual(&self) -> T {
        self.residuals.last().copied().unwrap_or_else(T::zero)
    }

    pub fn relative_residual(&self) -> T {
        let r = self.final_residual();
        if self.rhs_norm > T::zero() {
            r / self.rhs_norm
        } else {
            r
        }
    }

    pub fn final_rel_error(&self) -> Option<T> {
        self.rel_errors.last().copied()
    }
}

/// Shared bookkeeping for the solver loops.
pub(crate) struct Monitor<'o, 'a, T> {
    opts: &'o SolveOptions<'a, T>,
    pub rhs_norm: T,
    residuals: Vec<T>,
    half: Vec<T>,
    errors: Vec<T>,
    last_residual: T,
    last_error: Option<T>,
    flat_steps: usize,
}

impl<'o, 'a, T: Scalar> Monitor<'o, 'a, T> {
    pub fn new(opts: &'o SolveOptions<'a, T>, b: &[T]) -> Self {
        Self {
            opts,
            rhs_norm: norm2(b),
            residuals: Vec::new(),
            half: Vec::new(),
            errors: Vec::new(),
            last_residual: T::zero(),
            last_error: None,
            flat_steps: 0,
        }
    }

    pub fn tol_abs(&self) -> T {
        self.opts.tol * self.rhs_norm
    }

    /// Residual tolerance or the custom test.
    pub fn done(&self, x: &[T], rnorm: T) -> bool {
        rnorm <= self.tol_abs() || self.opts.stop.is_some_and(|f| f(x))
    }

    pub fn record(&mut self, x: &[T], rnorm: T) {
        self.record_opt(Some(x), rnorm)
    }

    /// Records a residual; the error history is updated only when `x` is known.
    pub fn record_opt(&mut self, x: Option<&[T]>, rnorm: T) {
        let first = self.residuals.is_empty();
        if first || self.opts.record_history {
            self.residuals.push(rnorm);
        }
        let err = self.opts.truth.zip(x).map(|(t, x)| rel_diff(x, t));
        if let Some(e) = err {
            if first || self.opts.record_history {
                self.errors.push(e);
            }
        }
        if !first {
            if rnorm > self.last_residual * (T::one() - T::rel_tol(1e-15)) {
                self.flat_steps += 1;
            } else {
                self.flat_steps = 0;
            }
        }
        self.last_residual = rnorm;
        if err.is_some() {
            self.last_error = err;
        }
    }

    pub fn record_half(&mut self, rnorm: T) {
        if self.opts.record_history {
            self.half.push(rnorm);
        }
    }

    /// Five consecutive iterations without relative progress, or a non-finite residual.
    pub fn stagnated(&self) -> bool {
        self.flat_steps >= 5 || !self.last_residual.is_finite()
    }

    pub fn finish(mut self, solution: Vec<T>, iterations: usize, termination: Termination) -> SolveReport<T> {
        if !self.opts.record_history && iterations > 0 {
            self.residuals.push(self.last_residual);
            self.errors.extend(self.last_error);
        }
        SolveReport {
            solution,
            iterations,
            residuals: self.residuals,
            half_step_residuals: self.half,
            rel_errors: self.errors,
            termination,
            rhs_norm: self.rhs_norm,
        }
    }
}

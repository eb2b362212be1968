use super::{Monitor, SolveOptions, SolveReport, Termination};
use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, gram2_solve, norm2, residual, Gram2, LinearOperator};
use crate::scalar::Scalar;
use crate::splittings::{SplittingPair, SubSolver};

/// Residuals are recomputed from scratch this often to curb drift.
const RESIDUAL_REFRESH: usize = 50;

/// Dimension of the search space of each half-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchDim {
    /// Minimize over `span{δ}` only.
    One,
    /// Minimize over `span{δ_k, δ_k - δ_{k-1}}`.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfStepKind {
    OneDim,
    TwoDim,
    /// `δ1` equal to the previous direction, so the 2-D space collapses.
    Degenerate,
    /// Singular Gram system resolved by the breakdown formula.
    Recovered,
    /// The sub-solve returned (numerically) zero: `r = 0`.
    Exact,
    /// `A δ = 0` with `r ≠ 0`, or a breakdown recovery that failed verification.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct HalfStepRecord<T> {
    pub kind: HalfStepKind,
    /// Step lengths along `δ1` and `δ2` (zero for unused directions).
    pub coefficients: (T, T),
    pub residual_norm: T,
    /// `A δ1`, `A δ2`; filled only when tracing.
    pub mapped: Vec<Vec<T>>,
    /// Residual after the half-step; filled only when tracing.
    pub residual: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Continue,
    /// Converged; `half` tells whether the stop happened after the first half.
    Converged { half: bool },
    LuckyBreakdown,
    Stagnation,
}

/// Iteration state of a two-step minimal residual method.
///
/// Each outer step applies `M̃⁻¹` then `M̂⁻¹` to the residual and minimizes the
/// residual over the resulting search space.
pub struct TwoStepMr<'s, 'a, T, O: ?Sized> {
    a: &'s O,
    b: &'s [T],
    split: &'s SplittingPair<'a, T>,
    dim: SearchDim,
    x: Vec<T>,
    r: Vec<T>,
    lucky_tol: T,
    prev_delta: [Option<Vec<T>>; 2],
    prev_x: [Vec<T>; 2],
    k: usize,
    trace: bool,
    last: Vec<HalfStepRecord<T>>,
}

impl<'s, 'a, T: Scalar, O: LinearOperator<T> + ?Sized> TwoStepMr<'s, 'a, T, O> {
    /// `tol` is the relative tolerance used to verify breakdown recoveries.
    pub fn new(
        a: &'s O,
        b: &'s [T],
        x0: &[T],
        split: &'s SplittingPair<'a, T>,
        dim: SearchDim,
        tol: T,
    ) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::NotSquare {
                nrows: n,
                ncols: a.ncols(),
            });
        }
        check_len(n, b.len())?;
        check_len(n, x0.len())?;
        check_len(n, split.m_tilde.dim())?;
        check_len(n, split.m_hat.dim())?;
        let r = residual(a, b, x0);
        let rhs_norm = norm2(b);
        Ok(Self {
            a,
            b,
            split,
            dim,
            x: x0.to_vec(),
            r,
            lucky_tol: T::lit(10.0) * tol * rhs_norm,
            prev_delta: [None, None],
            prev_x: [x0.to_vec(), x0.to_vec()],
            k: 0,
            trace: false,
            last: Vec::new(),
        })
    }

    /// Keep mapped directions and residual vectors of the most recent step.
    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn residual(&self) -> &[T] {
        &self.r
    }

    pub fn residual_norm(&self) -> T {
        norm2(&self.r)
    }

    /// Completed outer steps.
    pub fn iteration(&self) -> usize {
        self.k
    }

    /// Half-step records of the most recent outer step (one or two entries).
    pub fn last_step(&self) -> &[HalfStepRecord<T>] {
        &self.last
    }

    pub fn into_solution(self) -> Vec<T> {
        self.x
    }

    /// One outer step. `done(x, ‖r‖)` is checked after each half-step.
    pub fn step(&mut self, done: &dyn Fn(&[T], T) -> bool) -> StepStatus {
        if self.k > 0 && self.k % RESIDUAL_REFRESH == 0 {
            self.r = residual(self.a, self.b, &self.x);
        }
        self.last.clear();
        for which in 0..2 {
            let kind = self.half_step(which);
            let rnorm = self.last.last().map_or(T::zero(), |h| h.residual_norm);
            let status = match kind {
                HalfStepKind::Exact => StepStatus::Converged { half: which == 0 },
                HalfStepKind::Recovered => StepStatus::LuckyBreakdown,
                HalfStepKind::Stalled => StepStatus::Stagnation,
                _ if done(&self.x, rnorm) => StepStatus::Converged { half: which == 0 },
                _ => StepStatus::Continue,
            };
            if status != StepStatus::Continue {
                self.k += 1;
                return status;
            }
        }
        self.k += 1;
        StepStatus::Continue
    }

    fn half_step(&mut self, which: usize) -> HalfStepKind {
        let solver: &dyn SubSolver<T> = if which == 0 {
            &*self.split.m_tilde
        } else {
            &*self.split.m_hat
        };
        let d1 = solver.apply(&self.r);
        let tiny = T::lit(1e-300).max(T::min_positive_value());
        if norm2(&d1) <= tiny {
            self.push_record(HalfStepKind::Exact, (T::zero(), T::zero()), Vec::new());
            return HalfStepKind::Exact;
        }
        let w1 = self.a.apply(&d1);
        let snapshot = self.x.clone();
        let mut kind = HalfStepKind::OneDim;

        if let (SearchDim::Two, Some(prev)) = (self.dim, self.prev_delta[which].as_ref()) {
            let d2: Vec<T> = d1.iter().zip(prev).map(|(&u, &v)| u - v).collect();
            let w2 = self.a.apply(&d2);
            let g = Gram2::from_mapped(&w1, &w2, &self.r);
            match gram2_solve(&g) {
                Some((b1, b2)) => {
                    axpy(b1, &d1, &mut self.x);
                    axpy(b2, &d2, &mut self.x);
                    axpy(-b1, &w1, &mut self.r);
                    axpy(-b2, &w2, &mut self.r);
                    self.finish_half(which, d1, snapshot);
                    self.push_record(HalfStepKind::TwoDim, (b1, b2), vec![w1, w2]);
                    return HalfStepKind::TwoDim;
                }
                None => match self.breakdown_candidate(&d1, &d2, which) {
                    Some(x_star) => {
                        let r_star = residual(self.a, self.b, &x_star);
                        let w = vec![w1, w2];
                        if norm2(&r_star) <= self.lucky_tol {
                            self.x = x_star;
                            self.r = r_star;
                            self.finish_half(which, d1, snapshot);
                            self.push_record(HalfStepKind::Recovered, (T::zero(), T::zero()), w);
                            return HalfStepKind::Recovered;
                        }
                        self.push_record(HalfStepKind::Stalled, (T::zero(), T::zero()), w);
                        return HalfStepKind::Stalled;
                    }
                    // δ1 repeats the previous direction: the 2-D problem is 1-D
                    None => kind = HalfStepKind::Degenerate,
                },
            }
        }

        let m11 = dot(&w1, &w1);
        if !(m11 > T::zero()) {
            self.push_record(HalfStepKind::Stalled, (T::zero(), T::zero()), vec![w1]);
            return HalfStepKind::Stalled;
        }
        let beta = dot(&self.r, &w1) / m11;
        axpy(beta, &d1, &mut self.x);
        axpy(-beta, &w1, &mut self.r);
        self.finish_half(which, d1, snapshot);
        self.push_record(kind, (beta, T::zero()), vec![w1]);
        kind
    }

    /// `x* = (1 - ν) x + ν x_prev` with `ν = ⟨δ1, δ2⟩ / ‖δ2‖²`.
    fn breakdown_candidate(&self, d1: &[T], d2: &[T], which: usize) -> Option<Vec<T>> {
        let d2n = dot(d2, d2);
        if !(d2n > T::zero()) {
            return None;
        }
        let nu = dot(d1, d2) / d2n;
        Some(
            self.x
                .iter()
                .zip(&self.prev_x[which])
                .map(|(&xk, &xp)| (T::one() - nu) * xk + nu * xp)
                .collect(),
        )
    }

    fn finish_half(&mut self, which: usize, d1: Vec<T>, snapshot: Vec<T>) {
        self.prev_delta[which] = Some(d1);
        self.prev_x[which] = snapshot;
    }

    fn push_record(&mut self, kind: HalfStepKind, coefficients: (T, T), mapped: Vec<Vec<T>>) {
        let residual_norm = norm2(&self.r);
        let (mapped, residual) = if self.trace {
            (mapped, self.r.clone())
        } else {
            (Vec::new(), Vec::new())
        };
        self.last.push(HalfStepRecord {
            kind,
            coefficients,
            residual_norm,
            mapped,
            residual,
        });
    }
}

fn run<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    split: &SplittingPair<'_, T>,
    dim: SearchDim,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    let mut it = TwoStepMr::new(a, b, x0, split, dim, opts.tol)?;
    let mut mon = Monitor::new(opts, b);
    if mon.rhs_norm == T::zero() {
        // A nonsingular: the solution is exactly zero
        let zero = vec![T::zero(); b.len()];
        mon.record(&zero, T::zero());
        return Ok(mon.finish(zero, 0, Termination::Converged));
    }
    let r0 = it.residual_norm();
    mon.record(it.x(), r0);
    if mon.done(it.x(), r0) {
        return Ok(mon.finish(it.into_solution(), 0, Termination::Converged));
    }
    let tol_abs = mon.tol_abs();
    let stop = opts.stop;
    let done = move |x: &[T], rn: T| rn <= tol_abs || stop.is_some_and(|f| f(x));
    let mut termination = Termination::MaxIterations;
    while it.iteration() < opts.maxit {
        let status = it.step(&done);
        let last = it.last_step();
        if let (Some(first), 2) = (last.first(), last.len()) {
            mon.record_half(first.residual_norm);
        }
        mon.record(it.x(), it.residual_norm());
        termination = match status {
            StepStatus::Continue if mon.stagnated() => Termination::Stagnation,
            StepStatus::Continue => continue,
            StepStatus::Converged { .. } => Termination::Converged,
            StepStatus::LuckyBreakdown => Termination::LuckyBreakdown,
            StepStatus::Stagnation => Termination::Stagnation,
        };
        break;
    }
    let k = it.iteration();
    Ok(mon.finish(it.into_solution(), k, termination))
}

/// Two-step two-dimensional minimal residual iteration.
pub fn tstmr_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    split: &SplittingPair<'_, T>,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    run(a, b, x0, split, SearchDim::Two, opts)
}

/// Two-step one-dimensional minimal residual iteration (MRHSS when the
/// splittings are the HSS pair).
pub fn two_step_1d_mr_solve<T: Scalar, O: LinearOperator<T> + ?Sized>(
    a: &O,
    b: &[T],
    x0: &[T],
    split: &SplittingPair<'_, T>,
    opts: &SolveOptions<'_, T>,
) -> Result<SolveReport<T>> {
    run(a, b, x0, split, SearchDim::One, opts)
}

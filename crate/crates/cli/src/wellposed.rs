//! Convection–diffusion benchmarks.

use crate::config::Config;
use crate::report::{measure, Collector, Entry};
use crate::{BatchArgs, CliError, Outcome, Run};
use tstmr::linalg::{lanczos_extreme, split_hs, SparseMatrix};
use tstmr::problems::{convdiff2d_scaled, ConvDiffCase, ConvDiffScaling, Problem};
use tstmr::solvers::{gmres_solve, hss_solve, tstmr_solve, two_step_1d_mr_solve, SolveOptions};
use tstmr::splittings::{
    eta_star, hss_pair, ic0, ict, ilu0, make_inner_subsolver, ExactRealization, InnerMethod, SplittingMatrices,
    SplittingPair, SubSolver,
};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("problem.l", "80"),
    ("problem.cases", "I,II"),
    ("problem.scaling", "times_h2"),
    ("solver.methods", "tstmr,mr1d,mrhss"),
    ("solver.tol", "1e-10"),
    ("solver.maxit", "10000"),
    ("solver.alpha", "0.0002"),
    ("split.eta", "auto"),
    ("split.epsilon", "1e-5"),
    ("split.lanczos_iters", "300"),
    ("subsolver.mode", "exact"),
    ("subsolver.inner_tol", "1e-2"),
    ("subsolver.inner_maxit", "20"),
    ("subsolver.droptol", "0"),
    ("gmres.restart", "20"),
    ("gmres.precond", "ilu0"),
];

const METHODS: &[&str] = &["tstmr", "mr1d", "mrhss", "hss", "gmres"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact,
    Incomplete,
    Inner,
}

struct Settings {
    l: usize,
    cases: Vec<ConvDiffCase>,
    scaling: ConvDiffScaling,
    methods: Vec<&'static str>,
    tol: f64,
    maxit: usize,
    alphas: Vec<f64>,
    eta: Option<f64>,
    epsilon: f64,
    lanczos_iters: usize,
    mode: Mode,
    inner_tol: f64,
    inner_maxit: usize,
    droptol: f64,
    restart: usize,
    ilu_precond: bool,
}

impl Settings {
    fn parse(cfg: &Config) -> Result<Self, CliError> {
        let cases = cfg
            .choices("problem.cases", &["I", "II", "diffusion"])?
            .into_iter()
            .map(|c| match c {
                "I" => ConvDiffCase::I,
                "II" => ConvDiffCase::II,
                _ => ConvDiffCase::Diffusion,
            })
            .collect();
        let scaling = match cfg.choice("problem.scaling", &["times_h2", "divided_by_h2"])? {
            "times_h2" => ConvDiffScaling::TimesH2,
            _ => ConvDiffScaling::DividedByH2,
        };
        let mode = match cfg.choice("subsolver.mode", &["exact", "incomplete", "inner"])? {
            "exact" => Mode::Exact,
            "incomplete" => Mode::Incomplete,
            _ => Mode::Inner,
        };
        let droptol: f64 = cfg.get("subsolver.droptol")?;
        if !(droptol >= 0.0) {
            return Err(crate::config::ConfigError::new("subsolver.droptol must be >= 0").into());
        }
        Ok(Self {
            l: cfg.get("problem.l")?,
            cases,
            scaling,
            methods: cfg.choices("solver.methods", METHODS)?,
            tol: cfg.positive("solver.tol")?,
            maxit: cfg.get("solver.maxit")?,
            alphas: cfg.list("solver.alpha")?,
            eta: cfg.auto_or("split.eta")?,
            epsilon: cfg.positive("split.epsilon")?,
            lanczos_iters: cfg.get("split.lanczos_iters")?,
            mode,
            inner_tol: cfg.positive("subsolver.inner_tol")?,
            inner_maxit: cfg.get("subsolver.inner_maxit")?,
            droptol,
            restart: cfg.get("gmres.restart")?,
            ilu_precond: cfg.choice("gmres.precond", &["none", "ilu0"])? == "ilu0",
        })
    }
}

fn cholesky_like(h: &SparseMatrix<f64>, droptol: f64) -> tstmr::Result<Box<dyn SubSolver<f64>>> {
    Ok(if droptol > 0.0 { Box::new(ict(h, droptol)?) } else { Box::new(ic0(h)?) })
}

/// The TSTMR splitting for the configured sub-solver mode, with its
/// parameter summary.
fn tstmr_split<'a>(a: &SparseMatrix<f64>, s: &Settings, seed: u64) -> tstmr::Result<(SplittingPair<'a, f64>, String)> {
    let (h, _) = split_hs(a)?;
    match s.mode {
        Mode::Exact => {
            let eta = match s.eta {
                Some(e) => e,
                None => {
                    let (lo, hi) = lanczos_extreme(&h, s.lanczos_iters, seed);
                    eta_star(lo, hi)
                }
            };
            let m = SplittingMatrices::shifted_hs(a, 0.0, eta)?;
            let pair = m.exact_pair(ExactRealization::Auto, "H / eta I + S")?;
            Ok((pair, format!("mode=exact;eta={eta:.6e}")))
        }
        Mode::Incomplete => {
            let eta = s.eta.unwrap_or(4.0);
            let m = SplittingMatrices::shifted_hs(a, 0.0, eta)?;
            let pair = SplittingPair::new(
                cholesky_like(&m.m_tilde, s.droptol)?,
                ilu0(&m.m_hat)?,
                "IC(H) / ILU0(eta I + S)",
            );
            Ok((pair, format!("mode=incomplete;eta={eta:.6e};droptol={:.1e}", s.droptol)))
        }
        Mode::Inner => {
            let eps = s.epsilon;
            let m_tilde = h.shift_diagonal(eps)?;
            let m_hat = a.shift_diagonal(eps)?;
            let pc = cholesky_like(&h, s.droptol)?;
            let inner = make_inner_subsolver(m_tilde, InnerMethod::Cg, s.inner_tol, s.inner_maxit, Some(pc));
            let pair = SplittingPair::new(inner, ilu0(&m_hat)?, "PCG(H + eps I) / ILU0(A + eps I)");
            Ok((
                pair,
                format!(
                    "mode=inner;epsilon={eps:.1e};inner_tol={:.1e};inner_maxit={};droptol={:.1e}",
                    s.inner_tol, s.inner_maxit, s.droptol
                ),
            ))
        }
    }
}

fn case_entry(run: &Run, s: &Settings, p: &Problem<f64>, case: ConvDiffCase, out: &mut Collector) {
    let name = format!("convdiff_{}", case.name());
    let truth = p.truth.as_deref().expect("random truth");
    let opts = SolveOptions::new(s.tol, s.maxit).with_truth(truth).with_history(run.history);
    let x0 = vec![0.0; p.n()];
    let (a, b) = (&p.matrix, &p.rhs_clean);
    let base = format!("l={};tol={:.1e}", s.l, s.tol);
    let needs_split = s.methods.iter().any(|m| matches!(*m, "tstmr" | "mr1d"));
    let split = if needs_split { Some(tstmr_split(a, s, run.seed)) } else { None };
    for &method in &s.methods {
        let entry = |params: String| Entry {
            problem: &name,
            n: p.n(),
            method,
            params,
            relerr: None,
            psnr: None,
            repeats: run.repeat,
        };
        match method {
            "tstmr" | "mr1d" => match split.as_ref().expect("split built") {
                Ok((pair, desc)) => {
                    let solve = if method == "tstmr" { tstmr_solve::<f64, SparseMatrix<f64>> } else { two_step_1d_mr_solve };
                    let params = format!("{base};{desc}");
                    match measure(run.repeat, || solve(a, b, &x0, pair, &opts)) {
                        Ok(m) => out.push(entry(params), &m),
                        Err(e) => out.push_error(entry(params), &e),
                    }
                }
                Err(e) => out.push_error(entry(base.clone()), e),
            },
            "mrhss" | "hss" => {
                for &alpha in &s.alphas {
                    let params = format!("{base};alpha={alpha:.6e}");
                    let res = if method == "hss" {
                        measure(run.repeat, || hss_solve(a, b, &x0, alpha, &opts))
                    } else {
                        hss_pair(a, alpha, ExactRealization::Auto)
                            .and_then(|pair| measure(run.repeat, || two_step_1d_mr_solve(a, b, &x0, &pair, &opts)))
                    };
                    match res {
                        Ok(m) => out.push(entry(params), &m),
                        Err(e) => out.push_error(entry(params), &e),
                    }
                }
            }
            _ => {
                let params = format!(
                    "{base};restart={};precond={}",
                    s.restart,
                    if s.ilu_precond { "ilu0" } else { "none" }
                );
                let res = (|| {
                    let pc = if s.ilu_precond { Some(ilu0(a)?) } else { None };
                    let pc_ref = pc.as_ref().map(|f| f as &dyn SubSolver<f64>);
                    measure(run.repeat, || gmres_solve(a, b, &x0, s.restart, pc_ref, &opts))
                })();
                match res {
                    Ok(m) => out.push(entry(params), &m),
                    Err(e) => out.push_error(entry(params), &e),
                }
            }
        }
    }
}

pub fn run(args: &BatchArgs) -> Outcome {
    let run = Run::new(args, DEFAULTS)?;
    let s = Settings::parse(&run.cfg)?;
    let mut out = Collector::new();
    for &case in &s.cases {
        let p = match convdiff2d_scaled::<f64>(s.l, case, s.scaling) {
            Ok(p) => p.with_random_truth(run.seed),
            Err(e) => return Err(CliError::Config(crate::config::ConfigError::new(e.to_string()))),
        };
        log::info!("convdiff case {} l={} (n={})", case.name(), s.l, p.matrix.ncols());
        case_entry(&run, &s, &p, case, &mut out);
    }
    out.write(&run.out, "wellposed", run.history).map_err(CliError::Io)?;
    Ok(out.failures)
}

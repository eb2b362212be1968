//! Regularized augmented systems of the regtools-style test problems, and
//! the settings shared with the deblurring and field-of-values runs.

use crate::config::{Config, ConfigError};
use crate::report::{measure, Collector, Entry};
use crate::{BatchArgs, CliError, Outcome, Run};
use tstmr::illposed::{
    add_noise, build_regularized_split, discrepancy_stop, gcv_select_mu, AugmentedSystem, NoiseModel, OmegaInner,
    StoppingRule,
};
use tstmr::linalg::{norm2, rel_diff, svd, LinearOperator, SparseMatrix};
use tstmr::problems::{foxgood, gravity, phillips, Problem};
use tstmr::solvers::{cgw_solve, mshss_solve, tstmr_solve, two_step_1d_mr_solve, MshssParams, SolveOptions};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("problem.names", "foxgood,gravity,phillips"),
    ("problem.n", "200"),
    ("solver.methods", "tstmr,mshss,cgw"),
    ("solver.tol", "1e-6"),
    ("solver.maxit", "100"),
    ("illposed.mu", "auto"),
    ("illposed.gamma", "auto"),
    ("illposed.gamma_offset", "0.01"),
    ("illposed.noise_model", "uniform"),
    ("illposed.noise_level", "0.01"),
    ("illposed.inner", "gmres"),
    ("illposed.inner_tol", "1e-6"),
    ("illposed.max_itcg", "20"),
    ("stopping.rule", "fixed"),
    ("stopping.safety", "1.01"),
];

pub const PROBLEMS: &[&str] = &["foxgood", "gravity", "phillips"];
const METHODS: &[&str] = &["tstmr", "mr1d", "mshss", "cgw"];

pub fn generate(name: &str, n: usize) -> tstmr::Result<Problem<f64>> {
    match name {
        "foxgood" => foxgood(n),
        "gravity" => gravity(n),
        _ => phillips(n),
    }
}

pub fn noise_model(cfg: &Config) -> Result<NoiseModel<f64>, ConfigError> {
    let level: f64 = cfg.get("illposed.noise_level")?;
    if !(level >= 0.0) {
        return Err(ConfigError::new("illposed.noise_level must be >= 0"));
    }
    Ok(match cfg.choice("illposed.noise_model", &["uniform", "gaussian"])? {
        "uniform" => NoiseModel::UniformAbsolute(level),
        _ => NoiseModel::GaussianRelative(level),
    })
}

/// The `(Ω + S(K))` inner iteration. Block GMRES runs unrestarted up to the
/// system dimension; `illposed.max_itcg` caps Schur CG.
pub fn omega_inner(cfg: &Config, dim: usize) -> Result<OmegaInner<f64>, ConfigError> {
    let tol = cfg.positive("illposed.inner_tol")?;
    Ok(match cfg.choice("illposed.inner", &["gmres", "schur_cg"])? {
        "gmres" => OmegaInner::BlockGmres { tol, maxit: dim },
        _ => OmegaInner::SchurCg {
            tol,
            maxit: cfg.get("illposed.max_itcg")?,
        },
    })
}

pub fn inner_label(inner: &OmegaInner<f64>) -> String {
    match inner {
        OmegaInner::BlockGmres { tol, .. } => format!("inner=gmres;inner_tol={tol:.1e}"),
        OmegaInner::SchurCg { tol, maxit } => format!("inner=schur_cg;inner_tol={tol:.1e};max_itcg={maxit}"),
    }
}

/// Discrepancy rule from the actual relative noise when requested.
pub fn stopping_rule(cfg: &Config, relative_noise: f64) -> Result<StoppingRule<f64>, ConfigError> {
    Ok(match cfg.choice("stopping.rule", &["fixed", "discrepancy"])? {
        "fixed" => StoppingRule::FixedTol,
        _ => {
            let safety: f64 = cfg.get("stopping.safety")?;
            if !(safety >= 1.0) {
                return Err(ConfigError::new("stopping.safety must be >= 1"));
            }
            StoppingRule::Discrepancy {
                noise_level: relative_noise,
                safety,
            }
        }
    })
}

/// `‖g - A f‖ / ‖g‖`.
pub fn data_residual(a: &SparseMatrix<f64>, g: &[f64], f: &[f64]) -> f64 {
    let af = a.apply(f);
    let diff: Vec<f64> = g.iter().zip(&af).map(|(x, y)| x - y).collect();
    norm2(&diff) / norm2(g)
}

/// `illposed.mu`, or the GCV choice for `auto`.
pub fn select_mu(cfg: &Config, a: &SparseMatrix<f64>, g: &[f64]) -> Result<f64, CliError> {
    match cfg.auto_or::<f64>("illposed.mu")? {
        Some(mu) => Ok(mu),
        None => gcv_select_mu(&a.to_dense(), g).map_err(|e| CliError::Io(format!("GCV failed: {e}"))),
    }
}

/// Regularization parameters for one problem: `(mu, gamma)`.
pub fn mu_gamma(cfg: &Config, a: &SparseMatrix<f64>, g: &[f64]) -> Result<(f64, f64), CliError> {
    let mu = select_mu(cfg, a, g)?;
    let gamma = match cfg.auto_or::<f64>("illposed.gamma")? {
        Some(g) => g,
        None => mu * mu + cfg.positive("illposed.gamma_offset")?,
    };
    Ok((mu, gamma))
}

struct Settings {
    names: Vec<&'static str>,
    n: usize,
    methods: Vec<&'static str>,
    tol: f64,
    maxit: usize,
    noise: NoiseModel<f64>,
}

fn one_problem(run: &Run, s: &Settings, name: &str, out: &mut Collector) -> Result<(), CliError> {
    let p = generate(name, s.n).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    let a = &p.matrix;
    let g = add_noise(&p.rhs_clean, s.noise, run.seed).map_err(|e| CliError::Io(e.to_string()))?;
    let relative_noise = rel_diff(&g, &p.rhs_clean) * norm2(&p.rhs_clean) / norm2(&g);
    let (mu, gamma) = mu_gamma(&run.cfg, a, &g)?;
    let rule = stopping_rule(&run.cfg, relative_noise)?;
    let truth = p.truth.as_deref();
    let m = a.nrows();
    let stop = |x: &[f64]| discrepancy_stop(data_residual(a, &g, &x[m..]), &rule);
    let mut opts = SolveOptions::new(s.tol, s.maxit).with_history(run.history);
    if rule != StoppingRule::FixedTol {
        opts = opts.with_stop(&stop);
    }
    let label = format!("{name}({})", s.n);
    let entry_for = |method: &'static str, params: String, relerr: Option<f64>| Entry {
        problem: &label,
        n: s.n,
        method,
        params,
        relerr,
        psnr: None,
        repeats: run.repeat,
    };
    let sys = match AugmentedSystem::new(a, mu, gamma) {
        Ok(sys) => sys,
        Err(e) => {
            for &method in &s.methods {
                out.push_error(entry_for(method, format!("mu={mu:.6e};gamma={gamma:.6e}"), None), &e);
            }
            return Ok(());
        }
    };
    let inner = omega_inner(&run.cfg, sys.dim())?;
    let b = sys.rhs(&g).map_err(|e| CliError::Io(e.to_string()))?;
    let x0 = vec![0.0; sys.dim()];
    let base = format!("mu={mu:.6e};gamma={gamma:.6e};noise={relative_noise:.3e};tol={:.1e}", s.tol);
    log::info!("{label}: mu={mu:.3e} gamma={gamma:.3e}");
    let sv = if s.methods.contains(&"mshss") { Some(svd(&a.to_dense()).s) } else { None };
    for &method in &s.methods {
        let res = match method {
            "tstmr" | "mr1d" => {
                let params = format!("{base};{}", inner_label(&inner));
                let r = build_regularized_split(&sys, inner).and_then(|split| {
                    measure(run.repeat, || {
                        if method == "tstmr" {
                            tstmr_solve(&sys, &b, &x0, &split, &opts)
                        } else {
                            two_step_1d_mr_solve(&sys, &b, &x0, &split, &opts)
                        }
                    })
                });
                (params, r)
            }
            "mshss" => {
                let sv = sv.as_ref().expect("singular values");
                let pm = MshssParams::optimal(gamma, sv[0], sv[sv.len() - 1]);
                let params = format!("{base};alpha={:.6e};{}", pm.alpha, inner_label(&inner));
                (params, measure(run.repeat, || mshss_solve(&sys, &b, &x0, &pm, inner, &opts)))
            }
            _ => {
                let r = sys
                    .hk_solver()
                    .and_then(|hk| measure(run.repeat, || cgw_solve(&sys, &hk, &b, &x0, &opts)));
                (base.clone(), r)
            }
        };
        match res {
            (params, Ok(mres)) => {
                let f = sys.f_block(&mres.report.solution);
                let relerr = truth.map(|t| rel_diff(f, t));
                let params = format!("{params};data_res={:.4e}", data_residual(a, &g, f));
                out.push(entry_for(method, params, relerr), &mres);
            }
            (params, Err(e)) => out.push_error(entry_for(method, params, None), &e),
        }
    }
    Ok(())
}

pub fn run(args: &BatchArgs) -> Outcome {
    let run = Run::new(args, DEFAULTS)?;
    let cfg = &run.cfg;
    let s = Settings {
        names: cfg.choices("problem.names", PROBLEMS)?,
        n: cfg.get("problem.n")?,
        methods: cfg.choices("solver.methods", METHODS)?,
        tol: cfg.positive("solver.tol")?,
        maxit: cfg.get("solver.maxit")?,
        noise: noise_model(cfg)?,
    };
    let mut out = Collector::new();
    for name in &s.names {
        one_problem(&run, &s, name, &mut out)?;
    }
    out.write(&run.out, "illposed", run.history).map_err(CliError::Io)?;
    Ok(out.failures)
}

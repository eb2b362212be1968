//! Single Matrix Market system.

use crate::report::{measure, Collector, Entry};
use crate::{CliError, Outcome};
use clap::{Args, ValueEnum};
use std::path::PathBuf;
use tstmr::linalg::mmio::{read_matrix_market, read_vector, write_vector};
use tstmr::linalg::{lanczos_extreme, split_hs, LinearOperator};
use tstmr::solvers::{gmres_solve, hss_solve, tstmr_solve, two_step_1d_mr_solve, SolveOptions};
use tstmr::splittings::{eta_star, hss_pair, symmetric_shifted_skew_pair, ExactRealization};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Tstmr,
    Mr1d,
    Hss,
    Gmres,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// `M̃ = H(A)`, `M̂ = ηI + S(A)`.
    ShiftedSkew,
    /// `M̃ = αI + H(A)`, `M̂ = αI + S(A)`.
    Hss,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Coefficient matrix in Matrix Market coordinate format.
    matrix: PathBuf,
    /// Right-hand side, one value per line; defaults to `A·1`.
    #[arg(long)]
    rhs: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tstmr")]
    method: Method,
    /// Splitting used by `tstmr` and `mr1d`.
    #[arg(long, value_enum, default_value = "shifted-skew")]
    split: Split,
    /// HSS shift; defaults to `sqrt(λmin λmax)` of `H(A)`.
    #[arg(long)]
    alpha: Option<f64>,
    /// Skew shift of the shifted-skew splitting; defaults to the optimal `η*`.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    maxit: usize,
    /// GMRES restart length.
    #[arg(long, default_value_t = 20)]
    restart: usize,
    /// Output directory for `solution.txt` and `report.csv`.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Tstmr => "tstmr",
        Method::Mr1d => "mr1d",
        Method::Hss => "hss",
        Method::Gmres => "gmres",
    }
}

pub fn run(args: &SolveArgs) -> Outcome {
    let io = |e: tstmr::Error| CliError::Io(e.to_string());
    let a = read_matrix_market::<f64>(&args.matrix).map_err(io)?;
    if a.nrows() != a.ncols() {
        return Err(CliError::Io(format!(
            "{}: matrix is {}x{}, expected square",
            args.matrix.display(),
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let b = match &args.rhs {
        Some(p) => {
            let b = read_vector::<f64>(p).map_err(io)?;
            if b.len() != n {
                return Err(CliError::Io(format!("{}: {} entries, expected {n}", p.display(), b.len())));
            }
            b
        }
        None => a.apply(&vec![1.0; n]),
    };
    if !(args.tol > 0.0) {
        return Err(CliError::Io(format!("--tol must be positive, got {}", args.tol)));
    }
    let extremes = || -> tstmr::Result<(f64, f64)> {
        let (h, _) = split_hs(&a)?;
        Ok(lanczos_extreme(&h, 300, 1))
    };
    let alpha = || -> tstmr::Result<f64> {
        Ok(match args.alpha {
            Some(a) => a,
            None => {
                let (lo, hi) = extremes()?;
                (lo.max(f64::EPSILON * hi) * hi).sqrt()
            }
        })
    };
    let opts = SolveOptions::new(args.tol, args.maxit);
    let x0 = vec![0.0; n];
    let method = method_name(args.method);
    let problem = args
        .matrix
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".into());
    let base = format!("tol={:.1e}", args.tol);
    let res = (|| -> tstmr::Result<(String, crate::report::Measured)> {
        match args.method {
            Method::Tstmr | Method::Mr1d => {
                let (pair, params) = match args.split {
                    Split::ShiftedSkew => {
                        let eta = match args.eta {
                            Some(e) => e,
                            None => {
                                let (lo, hi) = extremes()?;
                                eta_star(lo, hi)
                            }
                        };
                        (
                            symmetric_shifted_skew_pair(&a, eta, ExactRealization::Auto)?,
                            format!("{base};split=shifted-skew;eta={eta:.6e}"),
                        )
                    }
                    Split::Hss => {
                        let alpha = alpha()?;
                        (hss_pair(&a, alpha, ExactRealization::Auto)?, format!("{base};split=hss;alpha={alpha:.6e}"))
                    }
                };
                let m = measure(1, || {
                    if args.method == Method::Tstmr {
                        tstmr_solve(&a, &b, &x0, &pair, &opts)
                    } else {
                        two_step_1d_mr_solve(&a, &b, &x0, &pair, &opts)
                    }
                })?;
                Ok((params, m))
            }
            Method::Hss => {
                let alpha = alpha()?;
                let m = measure(1, || hss_solve(&a, &b, &x0, alpha, &opts))?;
                Ok((format!("{base};alpha={alpha:.6e}"), m))
            }
            Method::Gmres => {
                let m = measure(1, || gmres_solve(&a, &b, &x0, args.restart, None, &opts))?;
                Ok((format!("{base};restart={}", args.restart), m))
            }
        }
    })();
    let mut out = Collector::new();
    let entry = |params: String| Entry {
        problem: &problem,
        n,
        method,
        params,
        relerr: None,
        psnr: None,
        repeats: 1,
    };
    match res {
        Ok((params, m)) => {
            std::fs::create_dir_all(&args.out)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;
            write_vector(args.out.join("solution.txt"), &m.report.solution).map_err(io)?;
            out.push(entry(params), &m);
        }
        Err(e) => out.push_error(entry(base), &e),
    }
    out.write(&args.out, "report", false).map_err(CliError::Io)?;
    Ok(out.failures)
}

//! Field-of-values enclosures of `K (Ω + S(K))⁻¹` next to numerically
//! computed extremes.

use crate::illposed::{generate, select_mu, noise_model, PROBLEMS};
use crate::report::{sci, write_rows};
use crate::{BatchArgs, CliError, Outcome, Run};
use serde::Serialize;
use tstmr::illposed::{
    add_noise, check_gamma_condition, fov_bound_interval, fov_numeric_imag_extent, fov_numeric_real_extremes,
    gamma_star, AugmentedSystem,
};
use tstmr::linalg::{svd, DenseMatrix};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("problem.names", "foxgood,gravity,phillips"),
    ("problem.n", "200"),
    ("illposed.mu", "auto"),
    ("illposed.gamma_offsets", "0.01,0.001"),
    ("illposed.noise_model", "uniform"),
    ("illposed.noise_level", "0.01"),
    ("fovtable.numeric", "true"),
];

#[derive(Serialize)]
struct FovRow {
    problem: String,
    n: usize,
    mu: String,
    gamma: String,
    gamma_star: String,
    eta_bar: String,
    real_lo: String,
    real_hi: String,
    imag_half_width: String,
    condition: bool,
    numeric_real_lo: String,
    numeric_real_hi: String,
    numeric_imag: String,
}

/// `Ω + S(K)` with `Ω = blkdiag(I, γI)`.
fn omega_plus_skew(k: &DenseMatrix<f64>, m: usize, gamma: f64) -> tstmr::Result<DenseMatrix<f64>> {
    let mut w = k.skew_part()?;
    for i in 0..k.nrows() {
        w[(i, i)] = if i < m { 1.0 } else { gamma };
    }
    Ok(w)
}

fn numeric(sys: &AugmentedSystem<&tstmr::linalg::SparseMatrix<f64>, f64>, m: usize) -> tstmr::Result<(f64, f64, f64)> {
    let k = DenseMatrix::from_operator(sys);
    let mhat = omega_plus_skew(&k, m, sys.gamma())?;
    let (lo, hi) = fov_numeric_real_extremes(&k, &mhat)?;
    Ok((lo, hi, fov_numeric_imag_extent(&k, &mhat)?))
}

pub fn run(args: &BatchArgs) -> Outcome {
    let run = Run::new(args, DEFAULTS)?;
    let cfg = &run.cfg;
    let names = cfg.choices("problem.names", PROBLEMS)?;
    let n: usize = cfg.get("problem.n")?;
    let offsets: Vec<f64> = cfg.list("illposed.gamma_offsets")?;
    let noise = noise_model(cfg)?;
    let with_numeric: bool = cfg.get("fovtable.numeric")?;
    let mut rows = Vec::new();
    let mut failures = 0;
    for name in names {
        let p = generate(name, n).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        let a = &p.matrix;
        let g = add_noise(&p.rhs_clean, noise, run.seed).map_err(|e| CliError::Io(e.to_string()))?;
        let mu = select_mu(cfg, a, &g)?;
        let s = svd(&a.to_dense()).s;
        // λ_min(AᵀA) is zero for wide matrices
        let lam = if a.nrows() >= a.ncols() { s[s.len() - 1].powi(2) } else { 0.0 };
        for &offset in &offsets {
            let gamma = mu * mu + offset;
            let mut row = FovRow {
                problem: format!("{name}({n})"),
                n,
                mu: sci(mu),
                gamma: sci(gamma),
                gamma_star: sci(gamma_star(mu).value),
                eta_bar: String::new(),
                real_lo: String::new(),
                real_hi: String::new(),
                imag_half_width: String::new(),
                condition: check_gamma_condition(mu, gamma, lam),
                numeric_real_lo: String::new(),
                numeric_real_hi: String::new(),
                numeric_imag: String::new(),
            };
            match fov_bound_interval(mu, gamma, lam) {
                Ok(b) => {
                    row.eta_bar = sci(b.eta_bar);
                    row.real_lo = sci(b.real_lo);
                    row.real_hi = sci(b.real_hi);
                    row.imag_half_width = sci(b.imag_half_width);
                }
                Err(e) => {
                    log::warn!("{name} gamma={gamma:.3e}: {e}");
                    failures += 1;
                }
            }
            if with_numeric {
                let res = AugmentedSystem::new(a, mu, gamma).and_then(|sys| numeric(&sys, a.nrows()));
                match res {
                    Ok((lo, hi, im)) => {
                        row.numeric_real_lo = sci(lo);
                        row.numeric_real_hi = sci(hi);
                        row.numeric_imag = sci(im);
                    }
                    Err(e) => {
                        log::warn!("{name} gamma={gamma:.3e}: numeric field of values failed: {e}");
                        failures += 1;
                    }
                }
            }
            log::info!(
                "{name}: mu={mu:.3e} gamma={gamma:.3e} real [{}, {}] numeric [{}, {}]",
                row.real_lo,
                row.real_hi,
                row.numeric_real_lo,
                row.numeric_real_hi
            );
            rows.push(row);
        }
    }
    std::fs::create_dir_all(&run.out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", run.out.display())))?;
    write_rows(&run.out.join("fovtable.csv"), &rows).map_err(CliError::Io)?;
    Ok(failures)
}

//! Motion-blur restoration: non-regularized augmented TSTMR against CGLS,
//! both stopped by the discrepancy principle.

use crate::config::ConfigError;
use crate::illposed::{data_residual, inner_label, noise_model, omega_inner, stopping_rule};
use crate::report::{measure, Collector, Entry};
use crate::{BatchArgs, CliError, Outcome, Run};
use std::path::PathBuf;
use tstmr::illposed::{build_nonregularized_split, discrepancy_stop, AugmentedSystem, StoppingRule};
use tstmr::linalg::{norm2, rel_diff, LinearOperator};
use tstmr::problems::{mblur_image_operator, psnr, read_pgm, synthetic_image, write_pgm, GrayImage};
use tstmr::solvers::{cgls_solve, tstmr_solve, SolveOptions};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("problem.image", "synthetic"),
    ("problem.size", "64"),
    ("deblur.bandw", "5,7"),
    ("solver.methods", "tstmr,cgls"),
    ("solver.tol", "1e-14"),
    ("solver.maxit", "500"),
    ("illposed.gamma", "0.001"),
    ("illposed.noise_model", "gaussian"),
    ("illposed.noise_level", "0.01"),
    ("illposed.inner", "schur_cg"),
    ("illposed.inner_tol", "1e-2"),
    ("illposed.max_itcg", "10"),
    ("stopping.rule", "discrepancy"),
    ("stopping.safety", "1.01"),
    ("output.images", "true"),
];

fn load_image(source: &str, size: usize) -> Result<(String, GrayImage), CliError> {
    if source.eq_ignore_ascii_case("synthetic") {
        return Ok((format!("synthetic{size}"), synthetic_image(size)));
    }
    let path = PathBuf::from(source);
    let img = read_pgm(&path).map_err(|e| CliError::Io(format!("cannot load image {}: {e}", path.display())))?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into());
    Ok((stem, img))
}

pub fn run(args: &BatchArgs) -> Outcome {
    let run = Run::new(args, DEFAULTS)?;
    let cfg = &run.cfg;
    let size: usize = cfg.get("problem.size")?;
    let (label, img) = load_image(cfg.str("problem.image"), size)?;
    let bandws: Vec<usize> = cfg.list("deblur.bandw")?;
    let methods = cfg.choices("solver.methods", &["tstmr", "cgls"])?;
    let tol = cfg.positive("solver.tol")?;
    let maxit: usize = cfg.get("solver.maxit")?;
    let gamma = cfg.positive("illposed.gamma")?;
    let noise = noise_model(cfg)?;
    let images: bool = cfg.get("output.images")?;
    let (w, h) = (img.width(), img.height());
    let mut out = Collector::new();
    if images {
        std::fs::create_dir_all(&run.out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", run.out.display())))?;
    }
    let save = |name: String, pixels: &[f64]| -> Result<(), CliError> {
        if !images {
            return Ok(());
        }
        let path = run.out.join(name);
        let im = GrayImage::new(w, h, pixels.to_vec()).map_err(|e| CliError::Io(e.to_string()))?;
        write_pgm(&path, &im).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    };
    for bandw in bandws {
        let a = mblur_image_operator::<f64>(w, h, bandw).map_err(|e| ConfigError::new(format!("deblur.bandw: {e}")))?;
        let clean = a.apply(img.pixels());
        let g = tstmr::illposed::add_noise(&clean, noise, run.seed).map_err(|e| CliError::Io(e.to_string()))?;
        let relative_noise = rel_diff(&g, &clean) * norm2(&clean) / norm2(&g);
        let rule = stopping_rule(cfg, relative_noise)?;
        let observed = GrayImage::new(w, h, g.clone()).map_err(|e| CliError::Io(e.to_string()))?;
        let before = psnr(&observed, &img).map_err(|e| CliError::Io(e.to_string()))?;
        save(format!("deblur_{label}_b{bandw}_observed.pgm"), &g)?;
        log::info!("{label} bandw {bandw}: observed PSNR {before:.2} dB");
        let problem = format!("{label}_bandw{bandw}");
        let m = a.nrows();
        let stop = |x: &[f64]| discrepancy_stop(data_residual(&a, &g, &x[m..]), &rule);
        let base = format!("gamma={gamma:.1e};noise={relative_noise:.3e};psnr_observed={before:.4}");
        for &method in &methods {
            let entry = |params: String, relerr: Option<f64>, psnr: Option<f64>| Entry {
                problem: &problem,
                n: w * h,
                method,
                params,
                relerr,
                psnr,
                repeats: run.repeat,
            };
            let res = if method == "tstmr" {
                let mut opts = SolveOptions::new(tol, maxit).with_history(run.history);
                if rule != StoppingRule::FixedTol {
                    opts = opts.with_stop(&stop);
                }
                let inner = omega_inner(cfg, m + w * h)?;
                let params = format!("{base};{}", inner_label(&inner));
                let r = AugmentedSystem::new(&a, 0.0, gamma).and_then(|sys| {
                    let b = sys.rhs(&g)?;
                    let split = build_nonregularized_split(&a, gamma, inner)?;
                    let x0 = vec![0.0; sys.dim()];
                    measure(run.repeat, || tstmr_solve(&sys, &b, &x0, &split, &opts))
                        .map(|mut mres| {
                            mres.report.solution.drain(..m);
                            mres
                        })
                });
                (params, r)
            } else {
                let opts = SolveOptions::new(tol, maxit).with_history(run.history);
                let x0 = vec![0.0; w * h];
                (base.clone(), measure(run.repeat, || cgls_solve(&a, &g, &x0, &opts, &rule)))
            };
            match res {
                (params, Ok(mres)) => {
                    let f = &mres.report.solution;
                    let restored = GrayImage::new(w, h, f.clone()).map_err(|e| CliError::Io(e.to_string()))?;
                    let after = psnr(&restored, &img).map_err(|e| CliError::Io(e.to_string()))?;
                    save(format!("deblur_{label}_b{bandw}_{method}.pgm"), f)?;
                    let params = format!("{params};data_res={:.4e}", data_residual(&a, &g, f));
                    out.push(entry(params, Some(rel_diff(f, img.pixels())), Some(after)), &mres);
                }
                (params, Err(e)) => out.push_error(entry(params, None, None), &e),
            }
        }
    }
    out.write(&run.out, "deblur", run.history).map_err(CliError::Io)?;
    Ok(out.failures)
}

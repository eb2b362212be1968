//! CSV result rows and JSON residual histories.

use serde::Serialize;
use std::path::{Path, PathBuf};
use tstmr::solvers::SolveReport;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub problem: String,
    pub n: usize,
    pub method: String,
    pub params: String,
    pub iter: usize,
    pub relres: String,
    pub relerr: String,
    pub psnr: String,
    pub wall_seconds: String,
    pub termination: String,
    pub repeats: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct History {
    pub problem: String,
    pub method: String,
    pub params: String,
    pub termination: String,
    pub residuals: Vec<f64>,
    pub half_step_residuals: Vec<f64>,
    pub rel_errors: Vec<f64>,
}

pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

pub fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

/// Outcome of one experiment entry across its repeats.
pub struct Measured {
    pub report: SolveReport<f64>,
    pub mean_seconds: f64,
}

/// Runs `f` `repeats` times (at least once) and keeps the last report; the
/// runs are deterministic so only the timing varies.
pub fn measure<E>(repeats: usize, mut f: impl FnMut() -> Result<SolveReport<f64>, E>) -> Result<Measured, E> {
    let repeats = repeats.max(1);
    let mut total = 0.0;
    let mut last = None;
    for _ in 0..repeats {
        let start = std::time::Instant::now();
        let r = f()?;
        total += start.elapsed().as_secs_f64();
        last = Some(r);
    }
    Ok(Measured {
        report: last.expect("at least one repeat"),
        mean_seconds: total / repeats as f64,
    })
}

/// Accumulates rows and histories for one subcommand run.
pub struct Collector {
    pub rows: Vec<Row>,
    pub histories: Vec<History>,
    pub failures: usize,
}

pub struct Entry<'a> {
    pub problem: &'a str,
    pub n: usize,
    pub method: &'a str,
    pub params: String,
    pub relerr: Option<f64>,
    pub psnr: Option<f64>,
    pub repeats: usize,
}

impl Collector {
    pub fn new() -> Self {
        Self {
            rows: Vec::new(),
            histories: Vec::new(),
            failures: 0,
        }
    }

    pub fn push(&mut self, e: Entry<'_>, m: &Measured) {
        let r = &m.report;
        if !r.termination.is_success() {
            self.failures += 1;
        }
        log::info!(
            "{} {} [{}]: {} iterations, relres {:.3e}, {}",
            e.problem,
            e.method,
            e.params,
            r.iterations,
            r.relative_residual(),
            r.termination
        );
        self.histories.push(History {
            problem: e.problem.to_string(),
            method: e.method.to_string(),
            params: e.params.clone(),
            termination: r.termination.to_string(),
            residuals: r.residuals.clone(),
            half_step_residuals: r.half_step_residuals.clone(),
            rel_errors: r.rel_errors.clone(),
        });
        self.rows.push(Row {
            problem: e.problem.to_string(),
            n: e.n,
            method: e.method.to_string(),
            params: e.params,
            iter: r.iterations,
            relres: sci(r.relative_residual()),
            relerr: opt_sci(e.relerr.or_else(|| r.final_rel_error())),
            psnr: e.psnr.map(|p| format!("{p:.4}")).unwrap_or_default(),
            wall_seconds: format!("{:.6}", m.mean_seconds),
            termination: r.termination.to_string(),
            repeats: e.repeats,
        });
    }

    /// A solver call that returned an error instead of a report.
    pub fn push_error(&mut self, e: Entry<'_>, err: &dyn std::fmt::Display) {
        log::warn!("{} {} [{}] failed: {err}", e.problem, e.method, e.params);
        self.failures += 1;
        self.rows.push(Row {
            problem: e.problem.to_string(),
            n: e.n,
            method: e.method.to_string(),
            params: e.params,
            iter: 0,
            relres: String::new(),
            relerr: String::new(),
            psnr: String::new(),
            wall_seconds: String::new(),
            termination: format!("error: {err}"),
            repeats: e.repeats,
        });
    }

    /// Writes `<stem>.csv` and, when requested, `<stem>_history.json`.
    pub fn write(&self, dir: &Path, stem: &str, history: bool) -> Result<Vec<PathBuf>, String> {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        let csv_path = dir.join(format!("{stem}.csv"));
        write_rows(&csv_path, &self.rows)?;
        let mut written = vec![csv_path];
        if history {
            let path = dir.join(format!("{stem}_history.json"));
            let json = serde_json::to_string_pretty(&self.histories).map_err(|e| e.to_string())?;
            std::fs::write(&path, json).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    for r in rows {
        w.serialize(r).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    w.flush().map_err(|e| format!("cannot write {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(method: &str) -> Entry<'_> {
        Entry {
            problem: "p",
            n: 3,
            method,
            params: "a=1".into(),
            relerr: None,
            psnr: None,
            repeats: 1,
        }
    }

    #[test]
    fn errors_count_as_failures_and_keep_the_row() {
        let mut c = Collector::new();
        c.push_error(entry("tstmr"), &"bad gamma");
        assert_eq!(c.failures, 1);
        assert_eq!(c.rows[0].termination, "error: bad gamma");
        assert!(c.histories.is_empty());
    }

    #[test]
    fn measure_averages_and_propagates_errors() {
        let mut calls = 0;
        let r: Result<Measured, &str> = measure(0, || {
            calls += 1;
            Err("boom")
        });
        assert!(r.is_err());
        assert_eq!(calls, 1);
        assert_eq!(sci(1234.5), "1.234500e3");
        assert_eq!(opt_sci(None), "");
    }
}

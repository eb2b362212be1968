use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn tstmr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tstmr"))
        .args(args)
        .env("TSTMR_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_mtx(path: &Path, n: usize, entries: &[(usize, usize, f64)]) {
    let mut s = format!("%%MatrixMarket matrix coordinate real general\n{n} {n} {}\n", entries.len());
    for (i, j, v) in entries {
        s.push_str(&format!("{} {} {v}\n", i + 1, j + 1));
    }
    std::fs::write(path, s).unwrap();
}

fn read_values(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

fn config(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Tridiagonal solve by elimination without pivoting.
fn thomas(sub: f64, diag: f64, sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let (mut c, mut d) = (vec![0.0; n], vec![0.0; n]);
    c[0] = sup / diag;
    d[0] = rhs[0] / diag;
    for i in 1..n {
        let m = diag - sub * c[i - 1];
        c[i] = sup / m;
        d[i] = (rhs[i] - sub * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[test]
fn identity_system_returns_ones() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("eye.mtx");
    write_mtx(&m, 4, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)]);
    let out = dir.path().join("out");
    let o = tstmr(&["solve", m.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_values(&out.join("solution.txt")), vec![1.0; 4]);
    let rows = csv_rows(&out.join("report.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][rows[0].iter().position(|h| h == "termination").unwrap()], "converged");
}

#[test]
fn laplacian_matches_tridiagonal_oracle() {
    let n = 50;
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("lap.mtx");
    let mut e = Vec::new();
    for i in 0..n {
        e.push((i, i, 2.0));
        if i > 0 {
            e.push((i, i - 1, -1.0));
            e.push((i - 1, i, -1.0));
        }
    }
    write_mtx(&m, n, &e);
    let b: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
    let rhs = dir.path().join("b.txt");
    std::fs::write(&rhs, b.iter().map(|v| format!("{v:e}\n")).collect::<String>()).unwrap();
    let oracle = thomas(-1.0, 2.0, -1.0, &b);
    let on = oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
    for split in ["hss", "shifted-skew"] {
        let out = dir.path().join(split);
        let o = tstmr(&[
            "solve",
            m.to_str().unwrap(),
            "--rhs",
            rhs.to_str().unwrap(),
            "--split",
            split,
            "--tol",
            "1e-12",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{split}: {}", stderr(&o));
        let x = read_values(&out.join("solution.txt"));
        let err = x.iter().zip(&oracle).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / on;
        assert!(err <= 1e-8, "{split}: relative error {err:e}");
    }
}

#[test]
fn missing_matrix_names_the_path() {
    let o = tstmr(&["solve", "/definitely/not/here.mtx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/definitely/not/here.mtx"));
}

#[test]
fn unknown_solver_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = tstmr(&["solve", "x.mtx", "--method", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let cfg = config(&dir, "c.cfg", "# methods\nsolver.methods = tstmr, bogus\n");
    let o = tstmr(&["illposed", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("line 2") && msg.contains("solver.methods") && msg.contains("bogus"), "{msg}");
}

#[test]
fn unknown_and_malformed_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    for (text, needle) in [
        ("solver.tol = 1e-6\nsolver.tl = 1e-6\n", "line 2"),
        ("solver.tol 1e-6\n", "line 1"),
        ("solver.tol = fast\n", "solver.tol"),
        ("illposed.gamma = 0.1\nillposed.gamma = 0.2\n", "duplicate"),
    ] {
        let cfg = config(&dir, "c.cfg", text);
        let o = tstmr(&["illposed", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(stderr(&o).contains(needle), "{text}: {}", stderr(&o));
    }
}

#[test]
fn invalid_log_level_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_tstmr"))
        .args(["solve", "x.mtx"])
        .env("TSTMR_LOG", "verbose")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("TSTMR_LOG"));
}

const SMALL_ILLPOSED: &str = "problem.n = 40\nsolver.methods = tstmr, mr1d, mshss, cgw\n";

fn without_timing(rows: &[Vec<String>]) -> Vec<Vec<String>> {
    let col = rows[0].iter().position(|h| h == "wall_seconds").unwrap();
    rows.iter()
        .map(|r| r.iter().enumerate().filter(|&(i, _)| i != col).map(|(_, v)| v.clone()).collect())
        .collect()
}

#[test]
fn batch_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.cfg", SMALL_ILLPOSED);
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = tstmr(&["illposed", "--config", &cfg, "--out", out.to_str().unwrap(), "--repeat", "1"]);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(2), "{}", stderr(&o));
        runs.push((
            csv_rows(&out.join("illposed.csv")),
            std::fs::read(out.join("illposed_history.json")).unwrap(),
        ));
    }
    assert_eq!(without_timing(&runs[0].0), without_timing(&runs[1].0));
    assert_eq!(runs[0].1, runs[1].1);
    let header = &runs[0].0[0];
    let expected = [
        "problem", "n", "method", "params", "iter", "relres", "relerr", "psnr", "wall_seconds", "termination", "repeats",
    ];
    assert_eq!(header, &expected);
    assert_eq!(runs[0].0.len(), 1 + 3 * 4);
}

#[test]
fn seed_changes_the_noise() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.cfg", "problem.n = 30\nproblem.names = gravity\nsolver.methods = tstmr\n");
    let params = |seed: &str| {
        let out = dir.path().join(seed);
        let o = tstmr(&["illposed", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed, "--repeat", "1"]);
        assert!(o.status.success(), "{}", stderr(&o));
        csv_rows(&out.join("illposed.csv"))[1][3].clone()
    };
    assert_ne!(params("1"), params("2"));
}

#[test]
fn wellposed_small_run() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "c.cfg",
        "problem.l = 12\nsolver.methods = tstmr,mr1d,mrhss,gmres\nsolver.alpha = 0.1, 1\noutput.history = false\n",
    );
    let out = dir.path().join("out");
    let o = tstmr(&["wellposed", "--config", &cfg, "--out", out.to_str().unwrap(), "--repeat", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("wellposed.csv"));
    // 2 cases x (tstmr, mr1d, 2 mrhss alphas, gmres)
    assert_eq!(rows.len(), 1 + 2 * 5);
    assert!(rows[1..].iter().all(|r| r[9] == "converged" && r[10] == "2"));
    assert!(!out.join("wellposed_history.json").exists());
}

#[test]
fn solver_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.cfg", "problem.l = 12\nproblem.cases = II\nsolver.methods = tstmr\nsolver.maxit = 1\n");
    let out = dir.path().join("out");
    let o = tstmr(&["wellposed", "--config", &cfg, "--out", out.to_str().unwrap(), "--repeat", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let rows = csv_rows(&out.join("wellposed.csv"));
    assert_eq!(rows[1][9], "max_iterations");
}

#[test]
fn deblur_reports_psnr_and_writes_images() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.cfg", "problem.size = 32\ndeblur.bandw = 5\n");
    let out = dir.path().join("out");
    let o = tstmr(&["deblur", "--config", &cfg, "--out", out.to_str().unwrap(), "--repeat", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("deblur.csv"));
    assert_eq!(rows.len(), 3);
    for r in &rows[1..] {
        assert!(r[7].parse::<f64>().unwrap() > 0.0);
    }
    for f in ["observed", "tstmr", "cgls"] {
        assert!(out.join(format!("deblur_synthetic32_b5_{f}.pgm")).exists());
    }
}

#[test]
fn fovtable_encloses_numeric_extremes() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.cfg", "problem.n = 24\n");
    let out = dir.path().join("out");
    let o = tstmr(&["fovtable", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("fovtable.csv"));
    assert_eq!(rows.len(), 1 + 3 * 2);
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    let val = |r: &[String], name: &str| r[col(name)].parse::<f64>().unwrap();
    for r in &rows[1..] {
        assert!(val(r, "numeric_real_lo") >= val(r, "real_lo") - 1e-8);
        assert!(val(r, "numeric_real_hi") <= val(r, "real_hi") + 1e-8);
        assert!(val(r, "numeric_imag") <= val(r, "imag_half_width") + 1e-8);
    }
}

//! Matrix Market coordinate files (1-based on disk) and plain-text vectors.

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMatrix;
use crate::scalar::Scalar;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn parse_matrix_market<T: Scalar, R: Read>(reader: R) -> Result<SparseMatrix<T>> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market input".into()))?;
    let header = header.map_err(|e| Error::Parse(e.to_string()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse(format!("bad header line: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Parse(format!("unsupported format '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::Parse(format!("unsupported field '{}'", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::Parse(format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip: Vec<(usize, usize, T)> = Vec::new();
    for (lineno, line) in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: malformed entry '{t}'", lineno + 1));
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad());
                size = Some((p(fields[0])?, p(fields[1])?, p(fields[2])?));
            }
            Some((m, n, _)) => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let i: usize = fields[0].parse().map_err(|_| bad())?;
                let j: usize = fields[1].parse().map_err(|_| bad())?;
                let v: f64 = fields[2].parse().map_err(|_| bad())?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(Error::Parse(format!(
                        "line {}: index ({i}, {j}) outside {m}x{n}",
                        lineno + 1
                    )));
                }
                let v = T::lit(v);
                trip.push((i - 1, j - 1, v));
                if i != j {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => trip.push((j - 1, i - 1, v)),
                        Symmetry::SkewSymmetric => trip.push((j - 1, i - 1, -v)),
                    }
                }
            }
        }
    }
    let (m, n, nnz) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let stored = match symmetry {
        Symmetry::General => trip.len(),
        _ => trip.iter().filter(|(i, j, _)| i >= j).count(),
    };
    if stored != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {stored}")));
    }
    SparseMatrix::from_triplets(m, n, trip)
}

pub fn read_matrix_market<T: Scalar>(path: impl AsRef<Path>) -> Result<SparseMatrix<T>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    parse_matrix_market(f).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Serializes in coordinate form. With `Symmetry::Symmetric` only the lower
/// triangle is written; the caller is responsible for the matrix being symmetric.
pub fn format_matrix_market<T: Scalar>(a: &SparseMatrix<T>, symmetry: Symmetry) -> String {
    let label = match symmetry {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
        Symmetry::SkewSymmetric => "skew-symmetric",
    };
    let entries: Vec<(usize, usize, T)> = match symmetry {
        Symmetry::General => a.triplets().collect(),
        Symmetry::Symmetric => a.triplets().filter(|(i, j, _)| i >= j).collect(),
        Symmetry::SkewSymmetric => a.triplets().filter(|(i, j, _)| i > j).collect(),
    };
    let mut out = format!("%%MatrixMarket matrix coordinate real {label}\n");
    let _ = writeln!(out, "{} {} {}", a.nrows(), a.ncols(), entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, v);
    }
    out
}

pub fn write_matrix_market<T: Scalar>(
    path: impl AsRef<Path>,
    a: &SparseMatrix<T>,
    symmetry: Symmetry,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix_market(a, symmetry)).map_err(|e| io_err(path, e))
}

/// Reads one value per line; blank lines and `%`/`#` comments are skipped.
pub fn read_vector<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('%') && !t.starts_with('#')
        })
        .map(|(k, l)| {
            l.trim().parse::<f64>().map(T::lit).map_err(|_| {
                Error::Parse(format!("{}: line {}: not a number", path.display(), k + 1))
            })
        })
        .collect()
}

pub fn write_vector<T: Scalar>(path: impl AsRef<Path>, v: &[T]) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut s = String::with_capacity(v.len() * 24);
    for x in v {
        let _ = writeln!(s, "{x:e}");
    }
    f.write_all(s.as_bytes()).map_err(|e| io_err(path, e))
}

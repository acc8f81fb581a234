//! MatrixMarket and label-file I/O.
//!
//! Adjacency matrices are written as `coordinate pattern symmetric`: each unordered pair,
//! self-loops included, appears once as a 1-indexed `row col` line with `row >= col`.
//! The reader also takes `real`/`integer` fields, `general` symmetry, and entries stored
//! with `row < col`. Labels are plain text, one 1-indexed integer per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Mat, SymmetricMatrix};
use crate::model::{AdjacencyMatrix, CommunityAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Pattern,
    Real,
    Integer,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Writes the adjacency pattern. Output depends only on the matrix.
pub fn write_adjacency<W: Write>(a: &AdjacencyMatrix, mut out: W) -> std::io::Result<()> {
    let n = a.n();
    let nnz = n as u64 + a.edge_count();
    writeln!(out, "%%MatrixMarket matrix coordinate pattern symmetric")?;
    writeln!(out, "{n} {n} {nnz}")?;
    for col in 0..n {
        for row in col..n {
            if a.get(row, col) {
                writeln!(out, "{} {}", row + 1, col + 1)?;
            }
        }
    }
    Ok(())
}

/// Writes a real symmetric matrix (lower triangle, shortest round-trip float formatting).
pub fn write_symmetric<W: Write>(m: &SymmetricMatrix<f64>, mut out: W) -> std::io::Result<()> {
    let n = m.dim();
    let mut entries = Vec::new();
    for col in 0..n {
        for row in col..n {
            let v = m[(row, col)];
            if v != 0.0 {
                entries.push((row, col, v));
            }
        }
    }
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {}", entries.len())?;
    for (row, col, v) in entries {
        writeln!(out, "{} {} {:e}", row + 1, col + 1, v)?;
    }
    Ok(())
}

/// Reads a square coordinate MatrixMarket matrix. Symmetric files are mirrored; pattern
/// entries read as 1.
pub fn read_matrix<R: BufRead>(input: R, path: &Path) -> Result<Mat<f64>> {
    let mut lines = input.lines().enumerate();
    let (field, symmetric) = loop {
        let Some((no, line)) = lines.next() else {
            return Err(parse_err(path, 0, "empty file"));
        };
        let line = line.map_err(io_err(path))?;
        let lower = line.trim().to_ascii_lowercase();
        if lower.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = lower.split_whitespace().collect();
        if tokens.first() != Some(&"%%matrixmarket") {
            return Err(parse_err(path, no + 1, "missing %%MatrixMarket banner"));
        }
        if tokens.len() < 5 || tokens[1] != "matrix" || tokens[2] != "coordinate" {
            return Err(parse_err(
                path,
                no + 1,
                "only 'matrix coordinate' files are supported",
            ));
        }
        let field = match tokens[3] {
            "pattern" => Field::Pattern,
            "real" | "double" => Field::Real,
            "integer" => Field::Integer,
            other => {
                return Err(parse_err(
                    path,
                    no + 1,
                    format!("unsupported field '{other}'"),
                ))
            }
        };
        let symmetric = match tokens[4] {
            "symmetric" => true,
            "general" => false,
            other => {
                return Err(parse_err(
                    path,
                    no + 1,
                    format!("unsupported symmetry '{other}'"),
                ))
            }
        };
        break (field, symmetric);
    };

    let mut size: Option<(usize, usize)> = None;
    let mut m = Mat::zeros(0, 0);
    let mut seen = 0usize;
    for (no, line) in lines {
        let line = line.map_err(io_err(path))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        let num = |k: usize| -> Result<usize> {
            tokens
                .get(k)
                .ok_or_else(|| parse_err(path, no + 1, "too few columns"))?
                .parse::<usize>()
                .map_err(|e| parse_err(path, no + 1, e.to_string()))
        };
        let Some((n, _)) = size else {
            let (rows, cols, nnz) = (num(0)?, num(1)?, num(2)?);
            if rows != cols {
                return Err(parse_err(
                    path,
                    no + 1,
                    format!("matrix is {rows}x{cols}, expected square"),
                ));
            }
            size = Some((rows, nnz));
            m = Mat::zeros(rows, rows);
            continue;
        };
        let (i, j) = (num(0)?, num(1)?);
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_err(
                path,
                no + 1,
                format!("index ({i}, {j}) outside 1..={n}"),
            ));
        }
        let v = match field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => tokens
                .get(2)
                .ok_or_else(|| parse_err(path, no + 1, "missing value"))?
                .parse::<f64>()
                .map_err(|e| parse_err(path, no + 1, e.to_string()))?,
        };
        m[(i - 1, j - 1)] = v;
        if symmetric {
            m[(j - 1, i - 1)] = v;
        }
        seen += 1;
    }
    match size {
        None => Err(parse_err(path, 0, "missing size line")),
        Some((_, nnz)) if nnz != seen => Err(parse_err(
            path,
            0,
            format!("size line announces {nnz} entries, found {seen}"),
        )),
        Some(_) => Ok(m),
    }
}

/// Reads an adjacency matrix. Missing diagonal entries are filled with the self-loop.
pub fn read_adjacency_file(path: &Path) -> Result<AdjacencyMatrix> {
    let mut m = read_matrix_file(path)?;
    for i in 0..m.rows() {
        m[(i, i)] = 1.0;
    }
    AdjacencyMatrix::from_matrix(&m)
}

pub fn read_matrix_file(path: &Path) -> Result<Mat<f64>> {
    let f = File::open(path).map_err(io_err(path))?;
    read_matrix(BufReader::new(f), path)
}

pub fn write_adjacency_file(a: &AdjacencyMatrix, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    write_adjacency(a, &mut w)
        .and_then(|_| w.flush())
        .map_err(io_err(path))
}

pub fn write_symmetric_file(m: &SymmetricMatrix<f64>, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    write_symmetric(m, &mut w)
        .and_then(|_| w.flush())
        .map_err(io_err(path))
}

pub fn write_assignment<W: Write>(a: &CommunityAssignment, mut out: W) -> std::io::Result<()> {
    for &l in a.labels() {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

/// Reads one label per line; blank lines and `#`/`%` comments are skipped.
pub fn read_assignment<R: BufRead>(input: R, path: &Path) -> Result<CommunityAssignment> {
    let mut labels = Vec::new();
    for (no, line) in input.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let l: usize = t
            .parse()
            .map_err(|e: std::num::ParseIntError| parse_err(path, no + 1, e.to_string()))?;
        if l == 0 {
            return Err(parse_err(path, no + 1, "labels are 1-indexed"));
        }
        labels.push(l);
    }
    CommunityAssignment::from_labels(labels)
}

pub fn read_assignment_file(path: &Path) -> Result<CommunityAssignment> {
    let f = File::open(path).map_err(io_err(path))?;
    read_assignment(BufReader::new(f), path)
}

pub fn write_assignment_file(a: &CommunityAssignment, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    write_assignment(a, &mut w)
        .and_then(|_| w.flush())
        .map_err(io_err(path))
}

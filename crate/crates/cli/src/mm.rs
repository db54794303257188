//! Matrix Market exchange format: coordinate and array layouts, real or
//! integer fields, general / symmetric / skew-symmetric storage.

use lsmr_core::LinearOperator;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lsmr_core::CsrMatrix;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn parse_header(line: &str) -> std::result::Result<(Layout, Symmetry), String> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err("header must read `%%MatrixMarket matrix <format> <field> <symmetry>`".into());
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(format!("unknown format `{other}`")),
    };
    match words[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(format!("unsupported field `{other}`; only real and integer are read")),
    }
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(format!("unsupported symmetry `{other}`")),
    };
    Ok((layout, symmetry))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> std::result::Result<T, String> {
    let tok = tok.ok_or_else(|| format!("missing {what}"))?;
    tok.parse().map_err(|_| format!("cannot parse {what} `{tok}`"))
}

/// Reads a Matrix Market file into CSR form. Symmetric storage is expanded
/// and duplicate coordinates are summed.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix_market(BufReader::new(file), path)
}

pub fn parse_matrix_market(reader: impl BufRead, path: &Path) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let err = |line: usize, msg: String| CliError::parse(path, line, msg);

    let (lno, header) = match lines.next() {
        Some((n, l)) => (n, l.map_err(|e| CliError::io(path, e))?),
        None => return Err(err(1, "empty file".into())),
    };
    let (layout, symmetry) = parse_header(&header).map_err(|m| err(lno, m))?;

    // Remaining non-comment, non-blank lines as (line number, tokens).
    let mut data = Vec::new();
    for (n, l) in lines {
        let l = l.map_err(|e| CliError::io(path, e))?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        data.push((n, t.to_string()));
    }
    let mut data = data.into_iter();
    let (size_line, size) = data.next().ok_or_else(|| err(lno, "missing size line".into()))?;
    let mut toks = size.split_whitespace();
    let m: usize = parse_num(toks.next(), "row count").map_err(|e| err(size_line, e))?;
    let n: usize = parse_num(toks.next(), "column count").map_err(|e| err(size_line, e))?;
    if symmetry != Symmetry::General && m != n {
        return Err(err(size_line, "symmetric storage requires a square matrix".into()));
    }

    let mut trips: Vec<(usize, usize, f64)> = Vec::new();
    let mut push = |line: usize, i: usize, j: usize, v: f64| -> Result<()> {
        match symmetry {
            Symmetry::General => trips.push((i, j, v)),
            Symmetry::Symmetric => {
                trips.push((i, j, v));
                if i != j {
                    trips.push((j, i, v));
                }
            }
            Symmetry::Skew => {
                if i == j {
                    return Err(err(line, "skew-symmetric matrix stores a diagonal entry".into()));
                }
                trips.push((i, j, v));
                trips.push((j, i, -v));
            }
        }
        Ok(())
    };

    match layout {
        Layout::Coordinate => {
            let nnz: usize = parse_num(toks.next(), "entry count").map_err(|e| err(size_line, e))?;
            let mut seen = 0;
            for (line, text) in data {
                let mut t = text.split_whitespace();
                let i: usize = parse_num(t.next(), "row index").map_err(|e| err(line, e))?;
                let j: usize = parse_num(t.next(), "column index").map_err(|e| err(line, e))?;
                let v: f64 = parse_num(t.next(), "value").map_err(|e| err(line, e))?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(err(line, format!("index ({i}, {j}) outside the declared {m} x {n}")));
                }
                if symmetry != Symmetry::General && j > i {
                    return Err(err(line, "symmetric storage must hold the lower triangle".into()));
                }
                seen += 1;
                if seen > nnz {
                    return Err(err(line, format!("more than the declared {nnz} entries")));
                }
                push(line, i - 1, j - 1, v)?;
            }
            if seen != nnz {
                return Err(err(size_line, format!("declared {nnz} entries, found {seen}")));
            }
        }
        Layout::Array => {
            // Column-major; symmetric kinds store the lower triangle only.
            let mut positions = (0..n).flat_map(|j| {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::Skew => j + 1,
                };
                (start..m).map(move |i| (i, j))
            });
            let mut last = size_line;
            for (line, text) in data {
                last = line;
                for tok in text.split_whitespace() {
                    let v: f64 = parse_num(Some(tok), "value").map_err(|e| err(line, e))?;
                    let (i, j) = positions.next().ok_or_else(|| err(line, "more values than the declared size".into()))?;
                    if v != 0.0 {
                        push(line, i, j, v)?;
                    }
                }
            }
            if positions.next().is_some() {
                return Err(err(last, "fewer values than the declared size".into()));
            }
        }
    }
    CsrMatrix::from_triplets(m, n, trips).map_err(|e| err(size_line, e.to_string()))
}

/// Writes `a` as `coordinate real general` with 17 significant digits, so
/// reading it back reproduces every value exactly.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "%%MatrixMarket matrix coordinate real general").map_err(io)?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz()).map_err(io)?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v).map_err(io)?;
    }
    w.flush().map_err(io)
}

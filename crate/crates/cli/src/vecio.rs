//! Plain-text vectors: one number per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

/// Reads one number per line, skipping blank lines and `%` or `#` comments.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let v = t.parse().map_err(|_| CliError::parse(path, i + 1, format!("cannot parse `{t}` as a number")))?;
        out.push(v);
    }
    Ok(out)
}

/// Writes one value per line with 17 significant digits.
pub fn write_vector(path: impl AsRef<Path>, x: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for v in x {
        writeln!(w, "{}", fmt_f64(*v)).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// 17 significant digits, enough to reproduce any `f64` exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

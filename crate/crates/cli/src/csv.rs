//! Plain-text vectors and matrices: one number per line, or comma-separated
//! on a line. Writes use 17 significant digits, which round-trip every
//! finite double exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_err, CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

fn parse_line(path: &Path, line: usize, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("expected a finite decimal number, found {tok:?}"),
                }),
            }
        })
        .collect()
}

/// Nonblank lines, numbered from 1, with the empty-file case reported on
/// line 1.
fn numbered_rows(path: &Path, text: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if !line.trim().is_empty() {
            rows.push(parse_line(path, i + 1, line)?);
        }
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "no numbers in file".into(),
        });
    }
    Ok(rows)
}

pub fn parse_vector(path: &Path, text: &str) -> CliResult<Vec<f64>> {
    Ok(numbered_rows(path, text)?.concat())
}

pub fn read_vector_csv(path: &Path) -> CliResult<Vec<f64>> {
    parse_vector(path, &read_text(path)?)
}

/// One row per line; all rows must have the same length.
pub fn read_matrix_csv(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let rows = numbered_rows(path, &text)?;
    let width = rows[0].len();
    let lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    for (row, (i, _)) in rows.iter().zip(lines) {
        if row.len() != width {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("row has {} entries, the first row has {width}", row.len()),
            });
        }
    }
    Ok(rows)
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::with_capacity(24 * v.len());
    for x in v {
        let _ = writeln!(s, "{}", format_number(*x));
    }
    s
}

pub fn write_vector_csv(path: &Path, v: &[f64]) -> CliResult<()> {
    std::fs::write(path, format_vector(v)).map_err(io_err(path))
}

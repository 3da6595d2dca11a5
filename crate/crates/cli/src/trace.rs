//! Convergence traces as comma-separated text.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use dualfb_core::solver::IterView;
use dualfb_core::TraceRow;

use crate::error::{io_err, CliResult};

pub const TRACE_HEADER: &str = "n,iterate_change,primal_obj,dual_obj,gap,wall_time_ms";

/// Collects one timed row per iteration and optionally echoes progress.
pub struct TraceRecorder {
    start: Instant,
    pub rows: Vec<(TraceRow, f64)>,
    keep: bool,
    /// Print every `every`-th row to stderr; 0 disables.
    every: usize,
}

impl TraceRecorder {
    pub fn new(keep: bool, every: usize) -> Self {
        Self {
            start: Instant::now(),
            rows: Vec::new(),
            keep,
            every,
        }
    }

    pub fn observe(&mut self, it: &IterView<'_>) {
        let ms = self.start.elapsed().as_secs_f64() * 1e3;
        if self.every > 0 && it.n % self.every == 0 {
            eprintln!("{}", format_row(it.row, ms));
        }
        if self.keep {
            self.rows.push((it.row.clone(), ms));
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, render(&self.rows)).map_err(io_err(path))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn format_row(r: &TraceRow, ms: f64) -> String {
    format!(
        "{},{:e},{},{},{},{ms:.3}",
        r.n,
        r.iterate_change,
        opt(r.primal_obj),
        opt(r.dual_obj),
        opt(r.gap)
    )
}

pub fn render(rows: &[(TraceRow, f64)]) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for (r, ms) in rows {
        let _ = writeln!(s, "{}", format_row(r, *ms));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_values_are_empty_fields() {
        let rows = vec![
            (
                TraceRow {
                    n: 0,
                    iterate_change: 0.5,
                    primal_obj: Some(1.0),
                    dual_obj: Some(-0.25),
                    gap: Some(0.75),
                },
                0.1,
            ),
            (
                TraceRow {
                    n: 1,
                    iterate_change: 0.125,
                    primal_obj: None,
                    dual_obj: None,
                    gap: None,
                },
                0.2,
            ),
        ];
        let text = render(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines[1], "0,5e-1,1e0,-2.5e-1,7.5e-1,0.100");
        assert_eq!(lines[2], "1,1.25e-1,,,,0.200");
    }
}

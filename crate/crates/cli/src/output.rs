use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use symtomo_core::harness::io::{write_atomic, write_report};
use symtomo_core::Result;

use crate::Format;

/// Prints a key/value report and, if asked, writes it as a report file.
pub fn emit_report(format: Format, metrics: &BTreeMap<String, String>, out: Option<&Path>) -> Result<()> {
    print!("{}", render_report(format, metrics));
    if let Some(path) = out {
        write_report(path, metrics)?;
    }
    Ok(())
}

pub fn render_report(format: Format, metrics: &BTreeMap<String, String>) -> String {
    let mut s = String::new();
    match format {
        Format::Text => {
            let width = metrics.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in metrics {
                let _ = writeln!(s, "{k:<width$}  {v}");
            }
        }
        Format::Csv => {
            s.push_str("metric,value\n");
            for (k, v) in metrics {
                let _ = writeln!(s, "{k},{v}");
            }
        }
    }
    s
}

/// Renders a table with a header row.
pub fn render_table(format: Format, header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&header.join(","));
            s.push('\n');
            for r in rows {
                s.push_str(&r.join(","));
                s.push('\n');
            }
        }
        Format::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
            };
            s.push_str(&line(header));
            s.push('\n');
            for r in rows {
                s.push_str(&line(r));
                s.push('\n');
            }
        }
    }
    s
}

pub fn emit_table(format: Format, header: &[String], rows: &[Vec<String>], out: Option<&Path>) -> Result<()> {
    let text = render_table(format, header, rows);
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

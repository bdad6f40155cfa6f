//! Deterministic CSV emission. Every artifact carries a reproducibility
//! block (config hash, version, thread count) and prints floats with 17
//! significant digits, so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ReproHeader {
    pub config_sha256: String,
    pub version: String,
    pub threads: usize,
}

impl ReproHeader {
    pub fn new(config_text: &str, threads: usize) -> Self {
        let mut h = Sha256::new();
        h.update(config_text.as_bytes());
        Self {
            config_sha256: format!("{:x}", h.finalize()),
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
        }
    }

    fn comment_lines(&self, out: &mut String) {
        let _ = writeln!(out, "# config_sha256: {}", self.config_sha256);
        let _ = writeln!(out, "# version: {}", self.version);
        let _ = writeln!(out, "# threads: {}", self.threads);
    }
}

/// 17 significant digits, locale-independent ('.' decimal point always).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a CSV: comment block, header row, one row per index. All columns
/// must have equal length; empty columns give a header-only file.
pub fn format_csv(
    header: &ReproHeader,
    comments: &[String],
    columns: &[(&str, Vec<f64>)],
) -> Result<String> {
    if columns.is_empty() {
        return Err(Error::DimMismatch("csv needs at least one column".into()));
    }
    let n = columns[0].1.len();
    for (name, vals) in columns {
        if vals.len() != n {
            return Err(Error::DimMismatch(format!(
                "column `{name}` has {} rows, expected {n}",
                vals.len()
            )));
        }
    }
    let mut out = String::new();
    header.comment_lines(&mut out);
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let names: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    let _ = writeln!(out, "{}", names.join(","));
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|(_, v)| format_float(v[i])).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    Ok(out)
}

/// Render a two-column name,value table for scalar reports.
pub fn format_table(
    header: &ReproHeader,
    comments: &[String],
    rows: &[(String, String)],
) -> String {
    let mut out = String::new();
    header.comment_lines(&mut out);
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "name,value");
    for (name, value) in rows {
        let _ = writeln!(out, "{name},{value}");
    }
    out
}

pub fn emit_csv(
    header: &ReproHeader,
    comments: &[String],
    columns: &[(&str, Vec<f64>)],
    path: &Path,
) -> Result<()> {
    let text = format_csv(header, comments, columns)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn emit_table(
    header: &ReproHeader,
    comments: &[String],
    rows: &[(String, String)],
    path: &Path,
) -> Result<()> {
    std::fs::write(path, format_table(header, comments, rows))?;
    Ok(())
}

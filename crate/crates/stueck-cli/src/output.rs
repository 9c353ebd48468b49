//! Deterministic file writers.  Every JSON document carries a top-level
//! `schema_version`; every CSV starts with a `# schema_version=N` line.
//! Floats are written with 17 significant digits so identical runs produce
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

/// Version stamp shared by all CLI-generated documents.
pub const SCHEMA_VERSION: u32 = 1;

/// Output format of sweep-style results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Formats a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Ensures the output directory exists and returns `dir/name`.
pub fn prepare_path(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Numerical(format!("cannot create output dir {}: {e}", dir.display()))
    })?;
    Ok(dir.join(name))
}

/// Writes a pretty-printed JSON document (with trailing newline) and returns
/// its path.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = prepare_path(dir, name)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes a CSV with the schema-version comment, a header, and rows of
/// 17-significant-digit floats.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<PathBuf> {
    let path = prepare_path(dir, name)?;
    let file = fs::File::create(&path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "# schema_version={SCHEMA_VERSION}")?;
    writeln!(w, "{header}")?;
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                write!(w, ",")?;
            }
            write!(w, "{}", fmt_f64(v))?;
            first = false;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(path)
}

//! Tables, CSV serialization and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

pub const SIGMA_HEADER: &str = "E,sigma";
pub const COUPLING_HEADER: &str = "E,re_W,im_W,abs_W,phase_W";
pub const JUMPS_HEADER: &str = "E,magnitude";
pub const TRAPPING_HEADER: &str = "alpha,k,re_E,gamma,A";
pub const CROSSING_HEADER: &str = "a,k,re_E,gamma,beta_abs,theta";

/// One CSV file worth of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, without the `.csv` extension.
    pub stem: String,
    pub header: &'static str,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn file_name(&self) -> String {
        format!("{}.csv", self.stem)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 48 + self.header.len() + 1);
        out.push_str(self.header);
        out.push('\n');
        for row in &self.rows {
            for (i, value) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format_float(*value));
            }
            out.push('\n');
        }
        out
    }

    /// Values of column `index`.
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|row| row[index]).collect()
    }
}

/// Shortest decimal that parses back to the same `f64`; scientific notation
/// outside `[1e-4, 1e16)` so tiny and huge values stay short.
pub fn format_float(value: f64) -> String {
    let magnitude = value.abs();
    if value == 0.0 || !value.is_finite() || (1e-4..1e16).contains(&magnitude) {
        format!("{value}")
    } else {
        format!("{value:e}")
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut file = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    file.write_all(contents).map_err(|e| CliError::io(path, e))?;
    file.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    file.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_tables(tables: &[Table], out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    tables
        .iter()
        .map(|table| {
            let path = out_dir.join(table.file_name());
            write_atomic(&path, table.to_csv().as_bytes())?;
            Ok(path)
        })
        .collect()
}

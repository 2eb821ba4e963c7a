//! Error reporting and atomic file output.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use engelsteer_core::SampledCurve;
use serde::Serialize;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    /// Input was well formed but the computation rejected it.
    Domain(engelsteer_core::Error),
}

impl CliError {
    pub fn io(path: &Path, e: impl Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn parse(path: &Path, e: impl Display) -> Self {
        CliError::Parse(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 1,
            CliError::Domain(_) => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let (code, message) = match self {
            CliError::Io(m) => ("IO_ERROR", m.clone()),
            CliError::Parse(m) => ("PARSE_ERROR", m.clone()),
            CliError::Domain(e) => (e.code(), e.to_string()),
        };
        json!({ "error": { "code": code, "message": message } }).to_string()
    }
}

impl From<engelsteer_core::Error> for CliError {
    fn from(e: engelsteer_core::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    write(tmp.as_file_mut())?;
    tmp.as_file_mut().flush().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn diagnostics_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

pub fn write_curve(output: &Path, curve: &SampledCurve) -> CliResult<()> {
    write_atomic(output, |w| curve.write_csv(w).map_err(|e| CliError::io(output, e)))
}

pub fn write_diagnostics(output: &Path, report: &impl Serialize) -> CliResult<()> {
    let path = diagnostics_path(output);
    write_atomic(&path, |w| {
        serde_json::to_writer_pretty(&mut *w, report).map_err(|e| CliError::io(&path, e))?;
        w.write_all(b"\n").map_err(|e| CliError::io(&path, e))
    })
}

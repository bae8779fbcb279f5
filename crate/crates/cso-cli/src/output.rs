//! Output plumbing: format selection and the stdout-or-file sink.

use std::env;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cso_core::Result;

/// Environment variable naming the default directory for `--out` paths.
pub const OUT_DIR_ENV: &str = "CSO_OUT_DIR";

/// Wire format of a command's structured output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-oriented plain text.
    Text,
    /// Pretty-printed JSON document.
    Json,
    /// Comma-separated rows with a header line.
    Csv,
}

/// Resolve a `--out` path: relative paths land under [`OUT_DIR_ENV`] when the
/// variable is set, absolute paths are taken verbatim.
pub fn resolve_out(path: Option<PathBuf>) -> Option<PathBuf> {
    let path = path?;
    if path.is_absolute() {
        return Some(path);
    }
    match env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => Some(Path::new(&dir).join(path)),
        _ => Some(path),
    }
}

/// Write `payload` to the resolved sink: the file at `out` (parent
/// directories are created) or stdout when no path was given.
pub fn emit(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(path, payload)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(payload.as_bytes())?;
            Ok(())
        }
    }
}

/// Pretty-print a serializable document with a trailing newline.
pub fn to_json_doc<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| cso_core::CoreError::Parse(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

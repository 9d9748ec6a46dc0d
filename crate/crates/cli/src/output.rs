use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::{CliError, Format, OutputArgs};

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Renders `value` as canonical JSON or as `text`, then writes it to
/// `--out` (temp file in the same directory, then rename) or to stdout.
pub(crate) fn emit<T: Serialize>(
    args: &OutputArgs,
    value: &T,
    text: impl FnOnce() -> String,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let body = match args.format {
        Format::Json => weylkit::json::to_json_string(value).map_err(|e| CliError::Parse {
            path: "<report>".into(),
            source: e,
        })?,
        Format::Text => text(),
    };
    match &args.out {
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
        Some(path) => write_atomic(path, body.as_bytes()),
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    weylkit::json::from_json_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        source: e,
    })
}

/// Rows of `[re, im]` rounded for terminal display.
pub(crate) fn matrix_lines(m: &weylkit::CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        out.push_str("   ");
        for j in 0..m.cols() {
            let z = m[(i, j)];
            out.push_str(&format!(" {:+.4}{:+.4}i", clean(z.re), clean(z.im)));
        }
        out.push('\n');
    }
    out
}

fn clean(x: f64) -> f64 {
    if x.abs() < 5e-5 {
        0.0
    } else {
        x
    }
}

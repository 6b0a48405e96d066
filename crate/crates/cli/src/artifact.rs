//! The JSON envelope every command writes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use survival_explain::TimeGrid;

use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `config` echoes every setting that influences the result; the output location and
/// wall-clock time are deliberately absent so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub tool_version: String,
    pub command: String,
    pub config: C,
    pub grid: Option<TimeGrid>,
    pub result: R,
}

/// An envelope as read back from disk.
pub type RawEnvelope = Envelope<Value, Value>;

impl RawEnvelope {
    /// Deserialize the payload into a concrete result type.
    pub fn result_as<R: DeserializeOwned>(&self) -> CliResult<R> {
        R::deserialize(&self.result).map_err(|e| {
            CliError::input(format!(
                "'{}' artifact has an unexpected result: {e}",
                self.command
            ))
        })
    }

    pub fn config_str(&self, key: &str) -> Option<&str> {
        self.config.get(key).and_then(Value::as_str)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numeric(format!("cannot serialize artifact: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn parse_envelope(text: &str) -> CliResult<RawEnvelope> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("not an artifact: {e}")))
}

pub fn read_envelope(path: &Path) -> CliResult<RawEnvelope> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_envelope(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write_text(dir: &Path, file_name: &str, text: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(file_name);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

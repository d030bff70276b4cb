// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


use std::path::Path;
use std::process::ExitCode;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// A failure reported as `{"error": {"kind": ..., "message": ...}}`.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError { kind: kind.to_string(), message: message.into() }
    }

    pub fn emit(&self) -> ExitCode {
        let body = serde_json::json!({"error": {"kind": self.kind, "message": self.message}});
        eprintln!("{body}");
        ExitCode::from(if self.kind == "usage" { 2 } else { 1 })
    }
}

impl From<sparsedecomp::Error> for CliError {
    fn from(e: sparsedecomp::Error) -> Self {
        CliError::new(e.kind(), e.to_string())
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new("schema", format!("{what} {} is not valid: {e}", path.display())))
}

pub fn require<'a>(path: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    path.as_deref().ok_or_else(|| CliError::new("usage", format!("{flag} is required for this command")))
}

pub fn to_text<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::new("runtime", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to stdout when absent.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let text = to_text(value)?;
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::new("io", format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A secondary artifact goes to its own path, or to stdout when the main
/// output went to a file; otherwise it is dropped (and logged).
pub fn write_side<T: Serialize>(side: Option<&Path>, main: Option<&Path>, value: &T) -> Result<(), CliError> {
    match (side, main) {
        (Some(p), _) => write_json(Some(p), value),
        (None, Some(_)) => write_json(None, value),
        (None, None) => {
            log::info!("report not written: pass --report or --output");
            Ok(())
        }
    }
}

//! The JSON envelope shared by every command, and the mapping from library
//! errors to exit codes.

use std::fmt;
use std::path::Path;

use gi_core::error::Error;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_AMBIGUOUS: u8 = 2;
pub const EXIT_RESOLUTION: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self { code: EXIT_VERIFICATION, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AmbiguousCase(_) | Error::Inconclusive(_) => EXIT_AMBIGUOUS,
        Error::Resolution(_) => EXIT_RESOLUTION,
        Error::InvalidTriple(_)
        | Error::Domain(_)
        | Error::UnsupportedCase(_)
        | Error::OnCut { .. }
        | Error::Pole { .. }
        | Error::Region { .. }
        | Error::Validity(_)
        | Error::NotExactBackground { .. } => EXIT_INPUT,
        Error::Convergence { .. }
        | Error::CutConstruction(_)
        | Error::Path { .. }
        | Error::Tail(_)
        | Error::Stiffness { .. } => EXIT_VERIFICATION,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: exit_code(&e), message: e.to_string() }
    }
}

/// What a command produced: its result document, an exit code, and the
/// message explaining a nonzero code.
pub struct Outcome {
    pub result: Value,
    pub code: u8,
    pub error: Option<String>,
    pub notes: Vec<String>,
    /// CSV or SVG text printed instead of the envelope on success.
    pub raw: Option<String>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Self { result, code: EXIT_OK, error: None, notes: Vec::new(), raw: None }
    }

    pub fn with_failure(result: Value, failure: Failure) -> Self {
        Self { result, code: failure.code, error: Some(failure.message), notes: Vec::new(), raw: None }
    }
}

pub fn envelope(command: &str, input: Value, outcome: &Outcome) -> Value {
    json!({
        "command": command,
        "input": input,
        "result": outcome.result,
        "diagnostics": {
            "exit_code": outcome.code,
            "error": outcome.error,
            "notes": outcome.notes,
        },
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

use std::collections::BTreeMap;

use dwork_core::CheckOutcome;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dwork-lab/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Computation,
}

#[derive(Clone, Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub name: String,
    pub message: String,
}

impl CliError {
    pub fn validation(name: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Validation,
            name: name.into(),
            message: message.into(),
        }
    }

    pub fn missing(flag: &str) -> Self {
        Self::validation("MissingParameter", format!("--{flag} is required"))
    }

    /// A library error raised while checking inputs.
    pub fn from_validation(e: dwork_core::Error) -> Self {
        Self::validation(e.name(), e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 1,
            ErrorKind::Computation => 2,
        }
    }
}

impl From<dwork_core::Error> for CliError {
    fn from(e: dwork_core::Error) -> Self {
        CliError {
            kind: ErrorKind::Computation,
            name: e.name().into(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped,
            detail: detail.into(),
        }
    }
}

impl From<CheckOutcome> for Check {
    fn from(c: CheckOutcome) -> Self {
        Check::new(c.name, c.passed, c.detail)
    }
}

/// What a command hands back on success.
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Check>,
    /// One line for standard error.
    pub summary: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorBody {
    pub name: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Document {
    pub schema: &'static str,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub result: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
    pub timing_ms: String,
}

/// Decimal-string JSON value.
pub fn num(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

pub fn nums<T: ToString>(v: impl IntoIterator<Item = T>) -> Value {
    Value::Array(v.into_iter().map(num).collect())
}

use std::fmt;

use microar_core::canonical;
use serde_json::{json, Map, Value};

/// Broad failure class; decides the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    NotFound,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::NotFound => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Io => "io",
            ErrorKind::NotFound => "not_found",
        }
    }
}

/// Position in a source document, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub source: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.line, self.column)
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub code: String,
    pub message: String,
    pub location: Option<Box<Location>>,
    pub details: Option<Box<Value>>,
}

impl CliError {
    pub fn new(kind: ErrorKind, code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind,
            code: code.into(),
            message: message.into(),
            location: None,
            details: None,
        }
    }

    pub fn validation(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, code, message)
    }

    pub fn io(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Io, code, message)
    }

    pub fn not_found(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::NotFound, code, message)
    }

    pub fn at(mut self, location: Option<Location>) -> Self {
        if self.location.is_none() {
            self.location = location.map(Box::new);
        }
        self
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = Some(Box::new(details));
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// Single-line canonical JSON report.
    pub fn to_line(&self) -> String {
        let mut body = Map::new();
        body.insert("code".into(), json!(self.code));
        body.insert("exit_code".into(), json!(self.exit_code()));
        body.insert("kind".into(), json!(self.kind.as_str()));
        body.insert("message".into(), json!(self.message));
        if let Some(loc) = &self.location {
            body.insert("location".into(), json!(loc.to_string()));
        }
        if let Some(d) = &self.details {
            body.insert("details".into(), (**d).clone());
        }
        let line = canonical::value_to_vec(&json!({ "error": body }));
        String::from_utf8(line).expect("json is utf-8")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(loc) = &self.location {
            write!(f, "{loc}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn io_error(what: &str, path: &std::path::Path, e: std::io::Error) -> CliError {
    let kind = if e.kind() == std::io::ErrorKind::NotFound {
        ErrorKind::NotFound
    } else {
        ErrorKind::Io
    };
    CliError::new(kind, "io", format!("{what} {}: {e}", path.display()))
}

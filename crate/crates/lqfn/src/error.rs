use thiserror::Error;

/// Exit code for successful runs.
pub const EXIT_OK: i32 = 0;
/// Exit code for file, parse, validation and numerical errors.
pub const EXIT_DOMAIN: i32 = 2;
/// Exit code for bad command-line usage.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Domain(#[from] lqfn_core::Error),

    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    pub fn parse(e: &serde_json::Error) -> Self {
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

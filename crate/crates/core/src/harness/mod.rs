//! Instance files, seeded generators and the verification suites.

use std::path::PathBuf;

use thiserror::Error;

pub mod checks;
pub mod generate;
pub mod instance;
pub mod suites;

pub use checks::Check;
pub use generate::{generate_instance, GeneratorKind};
pub use instance::{load_instance, parse_instance, run_instance, save_instance, Instance, InstanceFile};
pub use suites::{run_suite, Suite};

/// Process exit codes of the command-line tool.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// At least one checked relation failed.
    pub const VERIFICATION_FAILED: i32 = 1;
    /// Bad command-line usage, including unknown suite names.
    pub const USAGE: i32 = 2;
    /// The instance file is not well-formed JSON of the expected shape.
    pub const PARSE: i32 = 3;
    /// The instance parsed but violates an invariant.
    pub const VALIDATION: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error("invalid instance at {pointer}: {message}")]
    Validation { pointer: String, message: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } => exit::IO,
            HarnessError::Parse { .. } => exit::PARSE,
            HarnessError::Validation { .. } | HarnessError::Core(_) => exit::VALIDATION,
            HarnessError::UnknownSuite(_) | HarnessError::UnknownKind(_) | HarnessError::InvalidDims(_) => {
                exit::USAGE
            }
        }
    }

    pub(crate) fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Validation {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

/// Escapes one JSON-pointer reference token.
pub(crate) fn pointer_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

use std::fmt::Display;

use dnls_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config invalid at `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: CoreError,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Display) -> Self {
        CliError::ConfigInvalid {
            field: field.into(),
            message: message.to_string(),
        }
    }

    /// Wraps parse errors, recovering the offending field from serde's
    /// message when it names one.
    pub fn config(origin: &str, err: impl Display) -> Self {
        let message = err.to_string();
        let field = message
            .split('`')
            .nth(1)
            .filter(|_| message.starts_with("unknown field") || message.starts_with("missing field"))
            .unwrap_or(origin)
            .to_string();
        CliError::ConfigInvalid { field, message }
    }

    pub fn module(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Module {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: impl Display, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }

    /// 2 for configuration errors, 4 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid { .. } => 2,
            CliError::Module { .. } | CliError::Io { .. } => 4,
        }
    }
}

pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, CoreError> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::module(what, e))
    }
}

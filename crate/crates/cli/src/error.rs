use thiserror::Error;

/// Failures of the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: parse error at line {line}, column {column}: {msg}")]
    Parse { path: String, line: usize, column: usize, msg: String },
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error("task {task}: {source}")]
    Task {
        task: String,
        #[source]
        source: ntoda::Error,
    },
    #[error(transparent)]
    Engine(#[from] ntoda::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Exit code for the process: parse and usage problems map to 2,
    /// everything else to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Invalid(_) | CliError::Io(_) => 2,
            _ => 1,
        }
    }

    pub fn parse(path: &str, e: &serde_json::Error) -> CliError {
        CliError::Parse { path: path.into(), line: e.line(), column: e.column(), msg: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Invalid(msg.into()))
}

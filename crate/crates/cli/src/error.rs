use std::fmt::Display;

/// A failed command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or parameters. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Missing, empty or unreadable input. Exit code 2.
    #[error("{0:#}")]
    Input(anyhow::Error),
    /// A pipeline stage failed on valid input. Exit code 3.
    #[error("stage `{stage}` failed: {source:#}")]
    Stage {
        stage: &'static str,
        source: anyhow::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Stage { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub fn input<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Input(e.into())
}

pub fn stage<E: Into<anyhow::Error>>(stage: &'static str) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Stage {
        stage,
        source: e.into(),
    }
}

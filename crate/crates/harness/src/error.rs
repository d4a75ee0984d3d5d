use incbound_core::Error as CoreError;
use thiserror::Error;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// A core error tagged with the pipeline stage that raised it.
    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: CoreError,
    },

    #[error("bound inconsistency: {}", .0.join("; "))]
    Violations(Vec<String>),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type HarnessResult<T> = Result<T, HarnessError>;

impl HarnessError {
    pub fn stage(stage: &'static str) -> impl FnOnce(CoreError) -> HarnessError {
        move |source| HarnessError::Core { stage, source }
    }

    /// 0 success, 2 config/usage, 3 non-convergence, 4 bound inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Usage(_) => 2,
            HarnessError::Core { source, .. } => match source {
                CoreError::InvalidInput(_) | CoreError::GridMismatch(_) => 2,
                CoreError::NotConverged { .. } => 3,
                CoreError::DataInconsistency(_) => 4,
                _ => 1,
            },
            HarnessError::Violations(_) => 4,
            HarnessError::Io(_) | HarnessError::Verification(_) => 1,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Io(format!("json: {e}"))
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid model spec: {0}")]
    Spec(String),
    #[error("{0}")]
    Budget(String),
    #[error("{failed} validation check(s) failed")]
    Validation { failed: usize },
    #[error(transparent)]
    Core(#[from] nfg_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 0 success, 2 validation failure, 3 budget refusal, 4 spec error, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Budget(_) | CliError::Core(nfg_core::Error::BudgetExceeded { .. }) => 3,
            CliError::Spec(_) => 4,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Turns a core budget refusal into a message that says how to shrink the run.
pub fn budget_guidance(err: nfg_core::Error, what: &str) -> CliError {
    match err {
        nfg_core::Error::BudgetExceeded { states, budget } => CliError::Budget(format!(
            "{what}: exact enumeration needs {states} states but the budget is {budget}; \
             use a smaller model (or --quick for experiments), or raise {}",
            nfg_core::oracle::BUDGET_ENV
        )),
        other => CliError::Core(other),
    }
}

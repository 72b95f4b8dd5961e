use forestmat::ForestMatError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] ForestMatError),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 4 when enumeration is refused.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Core(e) => match e {
                ForestMatError::ExplosionGuard { .. } => 4,
                ForestMatError::InconsistentDimension(_)
                | ForestMatError::SingularMatrix
                | ForestMatError::NoConvergence(_)
                | ForestMatError::PatternViolation { .. }
                | ForestMatError::StructureMismatch(_) => 3,
                _ => 2,
            },
        }
    }
}

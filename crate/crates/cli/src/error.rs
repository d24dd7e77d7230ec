use polyra::PolyraError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Numeric(PolyraError),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Data(_) | Self::Io { .. } => 3,
            Self::Numeric(_) => 4,
        }
    }

    pub fn io(path: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }
}

impl From<PolyraError> for CliError {
    fn from(e: PolyraError) -> Self {
        match e {
            PolyraError::InvalidConfig(_) | PolyraError::InvalidCoordinate { .. } | PolyraError::InvalidLabels(_) => {
                Self::Usage(e.to_string())
            }
            PolyraError::DimensionMismatch { .. }
            | PolyraError::ZeroDimension
            | PolyraError::NonFinite(_)
            | PolyraError::Empty(_)
            | PolyraError::MinpoiTooLarge { .. } => Self::Data(e.to_string()),
            other => Self::Numeric(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian at ({i}, {j})")]
    NotHermitian { i: usize, j: usize },

    #[error("lifted system is rank deficient at Fourier frequency {frequency} (sigma_min = {sigma_min:e})")]
    RankDeficient { frequency: usize, sigma_min: f64 },

    #[error("measurement frame does not have full column rank (frequency {frequency})")]
    FrameRankDeficient { frequency: usize },

    #[error("shifted matrix is singular")]
    Singular,

    #[error("zero vector is not allowed here")]
    ZeroVector,

    #[error("support condition violated: out-of-support energy fraction {fraction:e}")]
    SupportViolation { fraction: f64 },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True for failures caused by the filesystem or malformed files rather
    /// than invalid numerical input.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Parse(_) => true,
            Error::Stage { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

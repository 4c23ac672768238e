use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("non-finite state at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("polynomial degree {0} is not supported by this scheme")]
    UnsupportedOrder(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("non-finite state detected at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Configuration problems are reported before any compute starts.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidArgument(_) | Error::UnsupportedOrder(_)
        )
    }

    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            e if e.is_config() => 2,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

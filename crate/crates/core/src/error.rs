use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("integration failure at t = {t}: {reason} (try a smaller time step)")]
    IntegrationFailure { t: f64, reason: String },

    #[error("stochastic step failure at t = {t}: {reason} (try a smaller time step)")]
    StepSize { t: f64, reason: String },

    #[error("trajectory with seed {seed} failed: {source}")]
    Trajectory {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported parameter regime: {0}")]
    UnsupportedRegime(String),

    #[error("singular parameters: {0}")]
    SingularParameter(String),

    #[error("degenerate dressing: {0}")]
    DegenerateDressing(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

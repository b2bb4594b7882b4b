use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `M - i*omega*I` is singular or too ill-conditioned to invert reliably.
    #[error("resonant singularity at omega = {omega} (condition estimate {condition:e})")]
    ResonantSingularity { omega: f64, condition: f64 },

    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,

    #[error("system is unstable (min Re(lambda) = {min_real_part:e}); no stationary state")]
    Unstable { min_real_part: f64 },

    #[error("Lyapunov system is singular")]
    LyapunovSingular,

    /// The frequency grid does not capture enough of the spectral weight.
    #[error("insufficient grid coverage: tail fraction {tail_fraction:e} exceeds {limit:e}")]
    InsufficientCoverage { tail_fraction: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::UnknownKey { .. } => "unknown_key",
            Error::Parse { .. } => "parse",
            Error::MissingKey(_) => "missing_key",
            Error::Precondition(_) => "precondition",
            Error::ResonantSingularity { .. } => "resonant_singularity",
            Error::EigenNonConvergence => "eigen_non_convergence",
            Error::Unstable { .. } => "unstable",
            Error::LyapunovSingular => "lyapunov_singular",
            Error::InsufficientCoverage { .. } => "insufficient_coverage",
            Error::Io(_) => "io",
        }
    }
}

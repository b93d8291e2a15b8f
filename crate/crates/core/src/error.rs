use thiserror::Error;

pub type Result<T> = std::result::Result<T, TwpaError>;

#[derive(Debug, Error)]
pub enum TwpaError {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular response at {freq:.6e} rad/s: {reason}")]
    Singularity { freq: f64, reason: String },

    #[error("invalid taper profile: {0}")]
    Profile(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("numerical failure at cell {cell}: {reason}")]
    Numerical { cell: usize, reason: String },

    #[error("integration did not converge: {0}")]
    Convergence(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl TwpaError {
    /// True for errors caused by user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            TwpaError::Configuration(_)
                | TwpaError::Parse(_)
                | TwpaError::Io { .. }
                | TwpaError::Profile(_)
                | TwpaError::Mismatch(_)
        )
    }
}

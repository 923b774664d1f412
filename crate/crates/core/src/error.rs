use thiserror::Error;

/// Errors raised by the ILW numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IlwError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unbounded value: {0}")]
    Unbounded(String),

    #[error("inadmissible wave parameters: {0}")]
    Admissibility(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("root not found: {0}")]
    RootNotFound(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parity precondition violated: {0}")]
    Parity(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("PF(2) precondition violated: {0}")]
    Pf2Precondition(String),

    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },
}

pub type Result<T> = std::result::Result<T, IlwError>;

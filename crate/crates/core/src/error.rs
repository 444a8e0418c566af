use thiserror::Error;

/// Errors raised by the numeric backend and the verification layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: need at least {min}")]
    InvalidDimension { dim: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for truncation dim {dim}")]
    OutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error(
        "truncation insufficient: edge mass {edge_mass:.3e} exceeds {tolerance:.1e}{}",
        suggested_dim.map(|d| format!(" (need dim >= {d})")).unwrap_or_default()
    )]
    Truncation { edge_mass: f64, tolerance: f64, suggested_dim: Option<usize> },

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("trace drift {drift:.3e} after integration with step {step:.1e}; retry with a smaller step")]
    StepSize { drift: f64, step: f64 },

    #[error(
        "quadrature of order {order} lost trace {deviation:.3e}; increase the order or the truncation dim"
    )]
    Quadrature { deviation: f64, order: usize },

    #[error("divergent quantity: {0}")]
    Divergent(String),

    #[error("optimizer did not converge: {0}")]
    Optimizer(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {x}")))
    }
}

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("derivative order {order} exceeds the configured cap {cap}")]
    OrderOverflow { order: u32, cap: u32 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("truncation did not converge below tolerance {tol:e} within {max_dim} levels per mode")]
    TruncationExceeded { max_dim: usize, tol: f64 },

    #[error("matrix exponential needs {0} squarings; input norm too large")]
    ScalingOverflow(u32),

    #[error("quadrature did not converge: successive refinements differ by {0:e}")]
    QuadratureNonconvergence(f64),

    #[error("degenerate denominator in {0}")]
    Degenerate(&'static str),

    #[error("oracle self-check failed: {0}")]
    OracleCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;

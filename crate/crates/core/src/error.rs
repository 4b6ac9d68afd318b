use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("volatility is not positive at x = {x}")]
    NonPositiveVolatility { x: f64 },

    #[error("quadrature on [{lo}, {hi}] did not reach tolerance within the depth limit")]
    QuadratureFailure { lo: f64, hi: f64 },

    #[error("no sign change found: {0}")]
    NoBracket(String),

    #[error("degenerate interval: a = {a}, b = {b}")]
    DegenerateInterval { a: f64, b: f64 },

    #[error("state became non-finite at x = {x}")]
    NonFiniteState { x: f64 },

    #[error("no b > {a} satisfies the barrier-matching condition")]
    EmptyRho { a: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

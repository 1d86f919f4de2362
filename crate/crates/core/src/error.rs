use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("B-spline order {0} out of range (expected 1..=10)")]
    SplineOrder(usize),

    #[error("degenerate translates: log alpha and log beta coincide ({0})")]
    DegenerateTranslates(f64),

    #[error("kernel `{0}` carries no closed-form Mellin transform")]
    MissingTransform(String),

    #[error("function `{label}` has no Mellin derivative of order {order}")]
    MissingDerivative { label: String, order: usize },

    #[error("sample series has no mean for k = {0}")]
    MissingSample(i64),

    #[error("parse error at position {position} (`{token}`): {message}")]
    Parse {
        token: String,
        position: usize,
        message: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(token: &str, position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            token: token.to_string(),
            position,
            message: message.into(),
        }
    }
}

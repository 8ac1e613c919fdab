use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigen-solve did not converge for eigenvalue {index}")]
    EigenNoConvergence { index: usize },

    #[error("quadrature did not converge: value {value}, estimated error {error:e} after {evaluations} evaluations")]
    QuadratureNoConvergence {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("laplace inversion did not converge with {nodes} nodes: value {value}, estimated error {error:e}")]
    InversionNoConvergence {
        nodes: usize,
        value: f64,
        error: f64,
    },

    #[error("tau = {tau:e} is below the series floor {floor:e}; the eigenseries needs ~1/sqrt(tau) terms")]
    InsufficientTruncation { tau: f64, floor: f64 },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

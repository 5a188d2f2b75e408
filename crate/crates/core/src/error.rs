use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank k={k} out of range for sample size n={n}")]
    RankOutOfRange { k: usize, n: usize },

    #[error("{what}: {value} is outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("model `{model}` does not expose closed-form derivatives at zero up to order {order}")]
    UnsupportedModel { model: String, order: usize },

    #[error("adaptive quadrature did not converge at x = {x}")]
    QuadratureFailure { x: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty sample")]
    EmptySample,

    #[error("sample of size {n} is too small for {statistic} (needs at least {min})")]
    Arity {
        statistic: &'static str,
        n: usize,
        min: usize,
    },

    #[error("invalid distribution spec `{0}`")]
    UnknownDistribution(String),

    #[error("invalid selector `{0}`")]
    UnknownSelector(String),

    #[error("line {line}: {message}")]
    Data { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: impl ToString, expected: &'static str) -> Error {
    Error::Domain {
        what,
        value: value.to_string(),
        expected,
    }
}

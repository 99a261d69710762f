use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {pos} near `{token}`: {message}")]
    Parse {
        token: String,
        pos: usize,
        message: String,
    },
    #[error("expansion budget of {budget} nodes exceeded")]
    ExpansionBudgetExceeded { budget: usize },
    #[error("element is not elliptic")]
    NotElliptic,
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("unsupported word problem: {0}")]
    UnsupportedWordProblem(String),
    #[error("unsupported membership: {0}")]
    UnsupportedMembership(String),
    #[error("no intersection oracle: {0}")]
    NoIntersectionOracle(String),
    #[error("not a stabiliser of the end: {0}")]
    NotAStabiliser(String),
    #[error("cyclic fact dependency through `{0}`")]
    CyclicFactDependency(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, pos: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("duplicate vertex name `{0}`")]
    DuplicateName(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("operation requires {expected}, instance model is {found}")]
    InvalidModel { expected: String, found: String },

    #[error("not a single-agent perturbation: {0}")]
    NotSingleAgentPerturbation(String),

    #[error("invalid forcing: {0}")]
    InvalidForcing(String),

    #[error("instance has {vertices} vertices, exceeding the brute-force cap of {cap}")]
    SizeLimit { vertices: usize, cap: usize },
}

impl Error {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            message: message.into(),
        }
    }
}

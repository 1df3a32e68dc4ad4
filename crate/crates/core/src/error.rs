use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("vertex set {0:?} is not hereditary")]
    NotHereditary(Vec<String>),
    #[error("vertex set {0:?} is not hereditary and saturated")]
    NotHereditarySaturated(Vec<String>),
    #[error("edges are not composable: {0}")]
    NotComposable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("elements belong to different algebras")]
    ContextMismatch,
    #[error("level violation at {path}: coefficient has level {coefficient_level}, at most {required_level} allowed")]
    LevelViolation { path: String, coefficient_level: usize, required_level: usize },
    #[error("level index {0} out of range")]
    LevelOutOfRange(usize),
    #[error("operation needs finite dimensions over the base field")]
    InfiniteDimension,
    #[error("operation is only available for finite-field towers")]
    NeedsFiniteField,
    #[error("matrix entry ({0},{1}) has a nonzero trivial-path part")]
    EpsilonNonzero(usize, usize),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("vertex {0:?} is a sink")]
    Sink(String),
    #[error("quiver has a cycle")]
    CyclicQuiver,
    #[error("special edge choice: {0}")]
    InvalidChoice(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

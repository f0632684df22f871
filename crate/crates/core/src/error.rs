use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable x{0} occurs more than once in a clause")]
    DuplicateVariable(u32),
    #[error("variable index {index} outside 1..={n}")]
    BadIndex { index: u32, n: usize },
    #[error("empty clause")]
    EmptyClause,
    #[error("assignment has length {got}, expected {expected}")]
    BadAssignment { expected: usize, got: usize },
    #[error("clause width {got}, expected {expected}")]
    BadWidth { expected: usize, got: usize },
    #[error("DIMACS line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("formula is not satisfiable")]
    NotSatisfiable,
    #[error("bound undefined: {0}")]
    Undefined(String),
    #[error("no satisfiable trial to condition on")]
    EmptyConditioning,
    #[error("invalid plan: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}

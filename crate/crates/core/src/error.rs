use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not unipotent{}", ctx(.0))]
    NotUnipotent(Option<String>),
    #[error("some eigenvalue is not a root of unity")]
    NotQuasiUnipotent,
    #[error("matrix is not symmetric/Hermitian")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("bad complex structure: {0}")]
    BadComplexStructure(String),
    #[error("bidegree ({p},{q}) out of range for n = {n}")]
    BadDegree { p: usize, q: usize, n: usize },
    #[error("expected {expected} classes, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("class is not Kähler")]
    NotKahler,
    #[error("chain stalled at level {0}")]
    ChainStalled(usize),
    #[error("no joint invariant class found at level {level} after {iterations} steps")]
    LChainNotFound { level: usize, iterations: usize },
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("class is not in F_{0}")]
    NotInFj(usize),
    #[error("malformed commutator word: {0}")]
    MalformedWord(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{}invariant violated: {invariant}", gen_prefix(.generator))]
    Invariant { generator: Option<usize>, invariant: String },
}

fn ctx(c: &Option<String>) -> String {
    c.as_ref().map(|s| format!(" ({s})")).unwrap_or_default()
}

fn gen_prefix(g: &Option<usize>) -> String {
    g.map(|i| format!("generator {i}: ")).unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, Error>;

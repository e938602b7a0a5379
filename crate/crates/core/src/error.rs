use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },

    #[error("formula syntax error at position {position}: {message}")]
    FormulaSyntax { position: usize, message: String },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("system is inconsistent: evidence is undefined")]
    InconsistentSystem,

    #[error("surrounding subsystem is inconsistent (so is the full system)")]
    InconsistentSubsystem,

    #[error("invalid pinned distribution: {0}")]
    InvalidDistribution(String),

    #[error("degenerate pinned distribution: p(M) < 1 but every model is pinned")]
    DegenerateDistribution,

    #[error("{0} is not the typical atom of its variable")]
    NotTypical(String),

    #[error("formula is inconsistent with the system")]
    InconsistentFormula,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model count exceeds cap {cap}; refusing to enumerate")]
    CapExceeded { cap: usize },

    #[error("refusing: {0}")]
    ResourceGuard(String),

    #[error("system has auxiliary variables; {0} is defined over plain CNF only")]
    AuxiliaryVariables(&'static str),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

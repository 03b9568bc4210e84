use thiserror::Error;

/// Errors raised across the library. Each variant maps onto one CLI exit code
/// via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate edge ({src}, {dst}) at line {line}")]
    DuplicateEdge { line: usize, src: usize, dst: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("walk dimension {dim} exceeds the cap of {cap}")]
    Scale { dim: usize, cap: usize },

    #[error("inadmissible perturbation: {0}")]
    Perturbation(String),

    #[error("inadmissible chi = {chi}: {msg}")]
    Chi { chi: f64, msg: String },

    #[error("initial state not in the dynamical subspace (residual {residual:e})")]
    NotInDynamical { residual: f64 },

    #[error("eigenpair matching ambiguous: {0}")]
    Ambiguous(String),

    #[error("bound undefined: {0}")]
    Bound(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::DuplicateEdge { .. } | Error::Invalid(_) => 2,
            Error::NoConvergence { .. } => 3,
            Error::Scale { .. } => 4,
            Error::Perturbation(_) => 5,
            Error::Chi { .. } => 6,
            Error::NotInDynamical { .. } | Error::Ambiguous(_) | Error::Bound(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

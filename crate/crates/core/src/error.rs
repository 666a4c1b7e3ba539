use thiserror::Error;

/// Errors surfaced by the solvers and the graph layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsoError {
    #[error("edge {index} endpoint {vertex} out of range for {n} vertices")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        n: usize,
    },
    #[error("graph contains a directed cycle: {witness:?}")]
    Cycle { witness: Vec<(usize, usize)> },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("edge {index} has invalid length {length}")]
    NegativeLength { index: usize, length: f64 },
    #[error("point is outside the barrier domain: {0}")]
    Infeasible(String),
    #[error("linear solver failed: {0}")]
    SolverFailure(String),
    #[error("iterate left the domain during {phase} iteration {iteration}")]
    InfeasibilityPanic { phase: &'static str, iteration: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("problem too large for {what}: {size} > {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("instance is not a directed path")]
    NotAPath,
    #[error("weight of vertex {vertex} is not positive: {weight}")]
    NonpositiveWeight { vertex: usize, weight: f64 },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
}

impl IsoError {
    /// Stable machine-readable code, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            IsoError::VertexOutOfRange { .. } => "E_RANGE",
            IsoError::Cycle { .. } => "E_CYCLE",
            IsoError::SelfLoop { .. } => "E_SELF_LOOP",
            IsoError::NegativeLength { .. } => "E_LENGTH",
            IsoError::Infeasible(_) => "E_INFEASIBLE",
            IsoError::SolverFailure(_) => "E_SOLVER",
            IsoError::InfeasibilityPanic { .. } => "E_IPM_DOMAIN",
            IsoError::Precondition(_) => "E_PRECONDITION",
            IsoError::ContractViolation(_) => "E_CONTRACT",
            IsoError::InvalidInstance(_) => "E_INSTANCE",
            IsoError::LengthMismatch { .. } => "E_LENGTH_MISMATCH",
            IsoError::TooLarge { .. } => "E_TOO_LARGE",
            IsoError::NotAPath => "E_NOT_A_PATH",
            IsoError::NonpositiveWeight { .. } => "E_WEIGHT",
            IsoError::NotPositiveDefinite { .. } => "E_NOT_PD",
        }
    }
}

pub type Result<T> = std::result::Result<T, IsoError>;

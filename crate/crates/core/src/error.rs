use thiserror::Error;

pub type Result<T> = std::result::Result<T, SymError>;

#[derive(Debug, Error)]
pub enum SymError {
    #[error("invalid dimension for {family}: got {got}, need at least {min}")]
    InvalidDimension {
        family: &'static str,
        got: usize,
        min: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("vector does not lie in the {space} subspace (residual {residual:.3e})")]
    NotInSubspace { space: &'static str, residual: f64 },

    #[error("algebra is not of compact type: {0}")]
    NotCompact(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency failure in term {term}: lemma route {lemma_route:.17e}, direct route {direct_route:.17e}")]
    RouteDisagreement {
        term: usize,
        lemma_route: f64,
        direct_route: f64,
    },

    #[error("subspace is not a Lie triple system (residual {0:.3e})")]
    NotTripleSystem(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

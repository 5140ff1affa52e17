use thiserror::Error;

/// Everything that can go wrong inside the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("band code has no legs")]
    EmptyCode,
    #[error("pole flag must be 0 or 1, got {0}")]
    BadPoleFlag(i64),
    #[error("leg {leg} has latitude degree {degree}; this operation needs |d| <= 1")]
    DegreeTooLarge { leg: usize, degree: i64 },
    #[error("latitude map is not onto [0,1]")]
    NotSurjective,
    #[error("a piece of the latitude map over [{from}, {to}] lies on the diagonal")]
    DegenerateDiagonal { from: String, to: String },
    #[error("composed fiber along itinerary {itinerary:?} is the identity circle map")]
    DegenerateFiber { itinerary: Vec<usize> },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid piecewise-linear map: {0}")]
    InvalidPlMap(String),
    #[error("invalid fibered map: {0}")]
    InvalidFiberedMap(String),
    #[error("leg census: no r-table row for pole case {case} with missable leg types {types}")]
    UncoveredCensusCase { case: String, types: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

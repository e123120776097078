use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape: {0}")]
    Shape(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("not-commuting-input: square {0} of the given components does not commute")]
    NotCommutingInput(usize),
    #[error("inconsistent-backend: {0}")]
    InconsistentBackend(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("hypothesis-violated: composite f{} f{} is nonzero", .0 + 1, .0)]
    HypothesisViolated(usize),
    #[error("composite-nonzero: f{} f{} is nonzero", .0 + 1, .0)]
    CompositeNonzero(usize),
    #[error("factorization-missing: {0}")]
    FactorizationMissing(String),
    #[error("not-finite-dimensional: paths of length {0} do not reduce")]
    NotFiniteDimensional(usize),
    #[error("relation-not-parallel: {0}")]
    RelationNotParallel(String),
    #[error("resolution-too-long: exceeded {0} steps")]
    ResolutionTooLong(usize),
    #[error("not-chain-map: {0}")]
    NotChainMap(String),
    #[error("certification-failed: {0}")]
    CertificationFailed(String),
    #[error("too-large: enumeration of {needed} elements exceeds cap {cap}")]
    TooLarge { needed: u128, cap: u128 },
    #[error("bracket-not-coset: the fill-in set is not a coset")]
    NotCoset,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

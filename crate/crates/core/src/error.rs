use thiserror::Error;

/// Errors raised by constructors and operations in this crate.
///
/// Validation-style operations (`check_*`, `mc_check`, `class_reduce`, ...)
/// do not use this type for mathematical failures; they return reports.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operands are defined over different generator sets")]
    MismatchedGenerators,

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("weight {weight} exceeds truncation N = {trunc}")]
    WeightOutOfRange { weight: usize, trunc: usize },

    #[error("truncation must be at least 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("derivation is not weight-raising (needs images of weight >= 2 and degree 0)")]
    NotWeightRaising,

    #[error("automorphism is not in the first filtration level (linear part is not the identity)")]
    NotUnipotent,

    #[error("automorphism does not commute with the differential")]
    NotAutomorphismOfDifferential,

    #[error("linear map is not invertible")]
    NotInvertible,

    #[error("requested weight window is unstable at N = {trunc}; need N >= {required}")]
    UnstableWindow { trunc: usize, required: usize },

    #[error("C-infinity structure is not minimal (m1 != 0)")]
    NonMinimal,

    #[error("C-infinity structure fails its relations: {0}")]
    InvalidCInfty(String),

    #[error("Chen differential check failed: {0}")]
    InvalidDifferential(String),

    #[error("fiber mismatch: {0}")]
    FiberMismatch(String),

    #[error("form is not invariant under holonomy generator {generator}")]
    NonInvariantForm { generator: usize },

    #[error("group cochain is not a cocycle at simplex `{0}`")]
    NotCocycle(String),

    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("simplicial identity violated: {0}")]
    SimplicialIdentity(String),

    /// A descriptor that parsed as JSON but does not name a valid object.
    #[error("{path}: {message}")]
    Descriptor { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

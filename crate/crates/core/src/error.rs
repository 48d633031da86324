use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("partition violation in category `{category}`: {detail}")]
    PartitionViolation { category: String, detail: String },

    #[error("probability violation: {0}")]
    ProbabilityViolation(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown attribute `{attribute}` in category `{category}`")]
    UnknownAttribute { category: String, attribute: String },

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("embedding violation: {0}")]
    EmbeddingViolation(String),

    #[error("entities specify different category subsets")]
    DimensionMismatch,

    #[error("similarity threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),

    #[error("conditioning event has zero probability")]
    ZeroMassCondition,

    #[error("invalid perspective: {0}")]
    InvalidPerspective(String),

    #[error("space has no entities with positive mass")]
    EmptySpace,

    #[error("message length {message} exceeds knowledge-base depth {depth}")]
    DepthExceeded { message: usize, depth: usize },

    #[error("knowledge base inconsistent with ensemble: {0}")]
    InconsistentKb(String),

    #[error("knowledge base lacks a required entry: {0}")]
    MissingConditional(String),

    #[error("partition does not match the distribution: {0}")]
    PartitionMismatch(String),

    #[error("balls overlap on attribute `{0}`")]
    OverlappingBalls(String),

    #[error("attribute `{0}` is not covered by any ball")]
    UncoveredAttribute(String),

    #[error("ball `{0}` covers no attribute")]
    EmptyBall(String),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("epsilon {epsilon} exceeds the category extent {extent}")]
    EpsilonExceedsExtent { epsilon: f64, extent: f64 },

    #[error("conditional assigns mass to `{0}` where the marginal is zero")]
    AbsolutelyDiscontinuous(String),

    #[error("gain is singular: I_KB = {i_kb} reaches H_c = {classical}")]
    GainSingularity { classical: f64, i_kb: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("context `{0}` has no codebook")]
    UnreachableContext(String),

    #[error("decode failure: {0}")]
    DecodeFailure(String),

    #[error("parity check failed")]
    ParityFailure,

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

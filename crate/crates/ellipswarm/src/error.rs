use thiserror::Error;

/// Failure modes across the library.
///
/// Errors split into two classes: usage errors (bad arguments, malformed
/// input files) and numeric or degeneracy errors (singular matrices,
/// non-finite objectives, inseparable data). The CLI maps the former to
/// exit code 1 and the latter to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("objective returned a non-finite value for particle {particle}")]
    NonFiniteObjective { particle: usize },

    #[error("target point lies inside the constraint region")]
    TargetInsideRegion,

    #[error("the two constraint regions intersect")]
    IntersectingRegions,

    #[error("classes {first:?} and {second:?} are not separable: their boundary ellipsoids intersect")]
    NotSeparable { first: String, second: String },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("degenerate projection: class means coincide")]
    DegenerateProjection,

    #[error("class {label:?} has {got} samples, needs at least {needed}")]
    TooFewSamples {
        label: String,
        needed: usize,
        got: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {} malformed row(s), first at line {}: {}", problems.len(), problems[0].0, problems[0].1)]
    Ingestion {
        path: String,
        problems: Vec<(usize, String)>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad arguments or malformed input, as
    /// opposed to numeric breakdown or degenerate data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::NotSymmetric
                | Error::NonFinite(_)
                | Error::TargetInsideRegion
                | Error::IntersectingRegions
                | Error::TooFewSamples { .. }
                | Error::InvalidConfig(_)
                | Error::Ingestion { .. }
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by state, channel and region constructors and evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("label not found: {0}")]
    LabelNotFound(String),
    #[error("duplicate subsystem label: {0}")]
    DuplicateLabel(String),
    #[error("subsystem {label} has invalid dimension {dim}")]
    InvalidDimension { label: String, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label sets overlap on {0}")]
    OverlappingLabels(String),
    #[error("labels {0:?} are not contiguous in the layout")]
    NotContiguous(Vec<String>),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("Kraus set is not trace preserving (max |sum K^dag K - I| = {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("map is not an isometry (max |V^dag V - I| = {deviation:.3e})")]
    NotIsometric { deviation: f64 },
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("channel carries no generalized dephasing description")]
    MissingDephasingSpec,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Budget violations are reported separately from validation failures.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

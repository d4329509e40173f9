use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("{path}: schema violation: {message}")]
    Schema { path: String, message: String },

    #[error("{path}: duplicate vertex id {id}")]
    DuplicateVertex { path: String, id: i64 },

    #[error("{path}: dangling edge: vertex {id} does not exist")]
    DanglingEdge { path: String, id: i64 },

    #[error("{path}: value must be finite")]
    NonFinite { path: String },

    #[error("invalid location: {0}")]
    InvalidLocation(String),

    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("points have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error("lattice resolution must be positive, got {0}")]
    NonPositiveResolution(f64),

    #[error("field is not refined for the target set: edge {edge} crosses level {level}")]
    Unrefined { edge: usize, level: f64 },

    #[error("forward map needs r <= s, got r = {r}, s = {s}")]
    ReversedRadii { r: f64, s: f64 },

    #[error("no definitional well field; supply radii explicitly")]
    NoDefinitionalWellField,

    #[error("analytic rule implemented for singleton targets only; use SampledParametric or Shift")]
    MultiTargetFullSupNorm,

    #[error("minimizing perturbation needs the full sup-norm family, got {0}")]
    MinimizingFamily(&'static str),

    #[error("regions overlap or touch; urysohn weights need positive distance")]
    RegionsNotSeparated,

    #[error("blend precondition violated: {0}")]
    BlendPrecondition(String),

    #[error("fields live on different complexes")]
    ComplexMismatch,

    #[error("search space of {candidates} candidates exceeds budget {budget}")]
    BudgetExceeded { candidates: f64, budget: u64 },

    #[error("instance too large for lattice search: {vertices} free vertices (limit {limit})")]
    InstanceTooLarge { vertices: usize, limit: usize },

    #[error("subspace oracle limits exceeded: {0}")]
    OracleLimits(String),

    #[error("fibers incompatible with merge tree: {0}")]
    IncompatibleFibers(String),

    #[error("sampled perturbation {index}: declared distance {declared} but sup distance is {actual}")]
    DeclaredDistance { index: usize, declared: f64, actual: f64 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

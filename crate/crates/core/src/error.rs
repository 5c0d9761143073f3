use thiserror::Error;

/// Errors raised while building states, operators and measurements.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not positive (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("theta {0} outside [-pi/4, pi/4]")]
    ThetaOutOfRange(f64),

    #[error("theta = 0 makes every hypothesis identical; {0}")]
    DegenerateTheta(&'static str),

    #[error("probability {name} = {value} outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("priors must be nonnegative and sum to 1 (sum {0})")]
    InvalidPriors(f64),

    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("need at least {min} detectors, got {n}")]
    TooFewDetectors { n: usize, min: usize },

    #[error("closed form requires an even detector count, got {0}")]
    OddDetectorCount(usize),

    #[error("excitation count {k} out of range 0..={n}")]
    ExcitationOutOfRange { k: usize, n: usize },

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("unsupported detector count {n} (allowed {min}..={max})")]
    UnsupportedDetectorCount { n: usize, min: usize, max: usize },

    #[error("unambiguous discrimination condition violated: {0}")]
    UnambiguousCondition(String),

    #[error("search budget must be at least 1")]
    EmptyBudget,

    #[error("eigendecomposition failed to converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;

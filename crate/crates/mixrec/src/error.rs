use thiserror::Error;

/// Errors surfaced by model construction, spectral kernels, and recovery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mixing weights are not a probability vector: {0}")]
    SimplexViolation(String),

    #[error("invalid component pmf: {0}")]
    PmfViolation(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("tensor needs {cells} cells, exceeding the budget of {budget}")]
    CapacityExceeded { cells: u128, budget: u128 },

    #[error("parameter out of range: {0}")]
    RangeViolation(String),

    #[error("sample index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("keep set must be nonempty")]
    EmptyKeepSet,

    #[error("row and column modes must partition the tensor modes: {0}")]
    ModePartitionError(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("requested rank {rank} exceeds min dimension {min_dim}")]
    RankTooLarge { rank: usize, min_dim: usize },

    #[error("retained singular value {sigma:.3e} is below the singularity tolerance {tol:.3e}")]
    SingularTruncation { sigma: f64, tol: f64 },

    #[error("spectrum has a complex conjugate pair (max |Im| = {max_imag:.3e})")]
    ComplexSpectrum { max_imag: f64 },

    #[error("eigenvalue gap {gap:.3e} is below the threshold {gap_min:.3e}")]
    DegenerateGap { gap: f64, gap_min: f64 },

    #[error("subset enumeration supports at most {max} columns, got {got}")]
    TooManyColumns { got: usize, max: usize },

    #[error("coordinate set must be nonempty")]
    EmptySet,

    #[error("no separating witness found after {trials} draws")]
    WitnessNotFound { trials: usize },

    #[error("rank collapse: sigma_{m} = {sigma:.3e} is below threshold {threshold:.3e}")]
    RankCollapse { m: usize, sigma: f64, threshold: f64 },

    #[error("probe weights exhausted after {redraws} redraws")]
    ProbeExhausted { redraws: usize },

    #[error("recovery needs d >= 2m-1 coordinates (d = {d}, m = {m})")]
    DimensionTooSmall { d: usize, m: usize },

    #[error("coordinate {0} was not recovered")]
    CoordinateNotRecovered(usize),

    #[error("model is not estimable: {0}")]
    NotEstimable(String),

    #[error("slope fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("vector is numerically zero")]
    ZeroVector,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

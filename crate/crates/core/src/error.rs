use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spin site {site} out of range for a {n}-spin system")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("empty spin subset")]
    EmptySubset,
    #[error("spin site {0} appears more than once")]
    DuplicateSite(usize),
    #[error("spin subsets overlap at site {0}")]
    OverlappingSubsets(usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("target state is not rank one")]
    NotPure,
    #[error("cat weights are not normalized: |a|^2 + |b|^2 = {0}")]
    UnnormalizedWeights(f64),
    #[error("purity fraction {0} outside (0, 1]")]
    BadPurityFraction(f64),
    #[error("negative duration {0} s")]
    NegativeTime(f64),
    #[error("invalid rate or parameter: {0}")]
    InvalidParameter(String),
    #[error("Monte Carlo phase-kick parameters are not set")]
    MonteCarloUnset,
    #[error("invalid spin system: {0}")]
    InvalidSystem(String),
    #[error("eigendecomposition failed")]
    Eigen,
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("potential parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:e})")]
    RootsNotConverged { iterations: usize, residual: f64 },

    #[error("degree k must be non-zero")]
    ZeroDegree,

    #[error("{0} is a perfect square; the Pell equation has only the trivial solution")]
    PerfectSquare(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("gamma is zero at the supplied Darboux point")]
    ZeroGamma,

    #[error("universal relation has a pole: eigenvalue {0} equals 1")]
    UnitEigenvalue(usize),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(usize),

    #[error("solution diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("initial state {index} is off the energy level by {discrepancy:e}")]
    OffEnergyLevel { index: usize, discrepancy: f64 },

    #[error("energy drift {drift:e} on orbit {orbit} exceeds {limit:e}")]
    EnergyDrift { orbit: usize, drift: f64, limit: f64 },

    #[error("superluminal line solution: |phi' d| = {0} >= 1")]
    Superluminal(f64),

    #[error("coefficient r(z) has a pole at z = {0}")]
    Pole(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frequency {k} is outside 1 <= |k| <= {k_max}")]
    IndexOutOfRange { k: i64, k_max: usize },
    #[error("zero mode magnitude {magnitude:e} exceeds mean tolerance {tol:e}")]
    MeanNotZero { magnitude: f64, tol: f64 },
    #[error("spectral content above the truncation ({relative_tail:e} relative) exceeds alias tolerance {tol:e}")]
    AliasingDetected { relative_tail: f64, tol: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("tuple contains a zero frequency")]
    ZeroFrequency,
    #[error("direct tuple sum for n = {n}, K = {k_max} exceeds the complexity budget")]
    ComplexityBudget { n: usize, k_max: usize },
    #[error("coefficient magnitude {magnitude:e} at t = {time} exceeds overflow guard; blowup suspected")]
    BlowupSuspected { time: f64, magnitude: f64 },
    #[error("sample stride too coarse: finite-difference error estimate {estimate:e} exceeds {tol:e}")]
    StrideTooCoarse { estimate: f64, tol: f64 },
    #[error("Picard iteration not contracting (update {update:e} after {iterations} iterations)")]
    NotContracting { iterations: usize, update: f64 },
    #[error("initial data norm {norm} exceeds the smallness threshold {threshold}")]
    SmallnessViolated { norm: f64, threshold: f64 },
    #[error("horizon T = {horizon} exceeds the guaranteed existence time {limit}")]
    HorizonTooLong { horizon: f64, limit: f64 },
    #[error("truncation tail estimate {estimate:e} exceeds tolerance {tol:e}")]
    TailTooLarge { estimate: f64, tol: f64 },
    #[error("gauge loop comes within {min_modulus:e} of the origin (required >= {w_min:e})")]
    GaugeSingular { min_modulus: f64, w_min: f64 },
    #[error("gauge loop has winding number {index}, mean-zero output requested")]
    WindingNonzero { index: i64 },
    #[error("argument increment {max_step} >= pi after refinement to N = {grid_size}")]
    GridTooCoarse { max_step: f64, grid_size: usize },
    #[error("adaptive quadrature did not converge (error estimate {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

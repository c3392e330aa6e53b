use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the range a type accepts.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The request is well-formed but asks for a state or regime the model
    /// does not define (e.g. an upper-level start with zero photons).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("state is not normalized: |psi|^2 = {norm_squared} (tolerance {tol})")]
    NotNormalized { norm_squared: f64, tol: f64 },

    #[error("step control failed: step-doubling difference {difference:e} above {tol:e} at dt = {dt:e}")]
    StepControl { difference: f64, tol: f64, dt: f64 },

    #[error("Poisson truncation failed: tail mass {tail:e} not below {tol:e} at N_max = {n_max}")]
    Truncation { tail: f64, tol: f64, n_max: usize },

    #[error("no oscillation detected in series")]
    NoOscillation,

    #[error("oscillation envelope never collapsed")]
    NoCollapse,

    #[error("no revival found after collapse at t = {collapse_time}")]
    NoRevival { collapse_time: f64 },
}

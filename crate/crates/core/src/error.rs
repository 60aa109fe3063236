use alloc::string::String;

/// Errors surfaced by the solver. Numerical failures are never clamped silently.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid piecewise-constant data: {0}")]
    InvalidPcFn(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state outside the admissible box")]
    OutsideDomain,
    #[error("strict hyperbolicity fails at a sampled state")]
    NotHyperbolic,
    #[error("newton iteration did not converge (residual {residual:e})")]
    NewtonFailed { residual: f64 },
    #[error("glimm functional {upsilon:e} exceeds the admissible bound {bound:e} at t = {time:e}")]
    DomainAdmission { upsilon: f64, bound: f64, time: f64 },
    #[error("ode horizon {t:e} exceeds the admissible time {t_max:e}")]
    HorizonExceeded { t: f64, t_max: f64 },
    #[error("front tracking exceeded {0} interactions")]
    TooManyEvents(usize),
    #[error(
        "declared source constant {name} violated: measured {measured:e} > declared {declared:e}"
    )]
    ConstantViolated {
        name: &'static str,
        measured: f64,
        declared: f64,
    },
    #[error("flux is not convex")]
    NonConvexFlux,
    #[error("entropy is not convex")]
    NonConvexEntropy,
}

pub type Result<T> = core::result::Result<T, Error>;

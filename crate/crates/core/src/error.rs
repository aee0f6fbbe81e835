use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix: det = {det:e} is below threshold {threshold:e}")]
    Singular { det: f64, threshold: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step failure at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("insufficient horizon: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    InsufficientHorizon { tail: f64, tol: f64 },

    #[error("non-convergence: {0}")]
    NonConvergence(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error(
        "guard violation at t = {t}: |eta_x - 1| = {deviation} > {bound} at node {node} (x = {x})"
    )]
    Guard {
        t: f64,
        node: usize,
        x: f64,
        deviation: f64,
        bound: f64,
    },

    #[error("CFL violation: dt = {dt:e} exceeds bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },

    #[error("antisymmetry violation: |M + M^T| = {0:e}")]
    NotAntisymmetric(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

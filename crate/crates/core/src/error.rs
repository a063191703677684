use thiserror::Error;

/// Errors raised by closures, solvers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closure `{closure}`: argument {value} outside domain ({lo}, {hi})")]
    Domain {
        closure: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("closure `{closure}`: cannot invert {value}: {reason}")]
    Inversion {
        closure: String,
        value: f64,
        reason: String,
    },

    #[error("closure `{closure}` does not provide {what}")]
    Capability { closure: String, what: &'static str },

    #[error("vacuum: {0}")]
    Vacuum(String),

    #[error("no intermediate state: {0}")]
    NoIntermediateState(String),

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("similarity coordinate {xi} outside rarefaction fan [{lo}, {hi}]")]
    OutOfFan { xi: f64, lo: f64, hi: f64 },

    #[error("degenerate characteristic field: {0}")]
    DegenerateField(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("collision: vehicle {index} reached its leader at t = {t}")]
    Collision { index: usize, t: f64 },

    #[error("positivity failure in cell {cell}: rho = {rho}")]
    Positivity { cell: usize, rho: f64 },

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("invalid entropy: {0}")]
    InvalidEntropy(String),
}

pub type Result<T> = std::result::Result<T, TomError>;

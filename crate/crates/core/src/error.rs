use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("metric is singular or not positive definite at the query point")]
    SingularMetric,

    #[error("degenerate plane: |u|²|v|² − g(u,v)² = {0:e}")]
    DegeneratePlane(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bracket does not close in the basis: {0}")]
    ClosureFailure(String),

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("point lies outside the admissible domain: {0}")]
    OutOfDomain(String),

    #[error("target unreachable in the lattice graph")]
    Disconnected,

    #[error("shooting did not converge (best residual {residual:e})")]
    ShootingDiverged { residual: f64 },

    #[error("degenerate sample design: {0}")]
    DegenerateDesign(String),

    #[error("calibration residual {residual:e} exceeds tolerance {tolerance:e}")]
    CalibrationResidual { residual: f64, tolerance: f64 },

    #[error("cone element is not positive: {0}")]
    NotPositive(String),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

use thiserror::Error;

/// Failures raised by the thermodynamic, solution and singularity routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state (T={temperature}, rho={density}) is outside the model domain: {reason}")]
    Domain {
        temperature: f64,
        density: f64,
        reason: &'static str,
    },
    #[error("density {density} is outside the admissible range: {reason}")]
    DensityDomain { density: f64, reason: &'static str },
    #[error("the ideal gas has no spinodal")]
    NoSpinodal,
    #[error("no phase transition at T={temperature}: {reason}")]
    NoPhaseTransition {
        temperature: f64,
        reason: &'static str,
    },
    #[error("{what} did not converge (best residual {residual:e})")]
    ConvergenceFailure { what: String, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular density rho={density} (1 - C3*rho vanishes)")]
    SingularDensity { density: f64 },
    #[error("(rho={density}, t={time}) lies on the caustic, |x_rho|={x_rho:e}")]
    CausticPoint { density: f64, time: f64, x_rho: f64 },
    #[error("caustic discriminant is negative over the whole density range")]
    EmptyCaustic,
    #[error("no shock at t={time}: the solution is smooth before t*={breakdown}")]
    NoShock { time: f64, breakdown: f64 },
    #[error("the homentrope never enters the two-phase region")]
    EmptyCurve,
}

pub type Result<T> = std::result::Result<T, Error>;

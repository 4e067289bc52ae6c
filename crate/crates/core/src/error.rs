use thiserror::Error;

/// Errors raised by the landscape library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandscapeError {
    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("H0 and V commute (commutator norm {norm:.3e}); the control problem is trivial")]
    CommutingHamiltonians { norm: f64 },

    #[error("degenerate interaction: V is proportional to the identity (denominator {denominator:.3e})")]
    DegenerateInteraction { denominator: f64 },

    #[error("inconsistent system: drift norm {norm:.3e} vanishes")]
    VanishingDrift { norm: f64 },

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("horizon mismatch: grid covers T = {grid}, perturbation has T = {perturbation}")]
    HorizonMismatch { grid: f64, perturbation: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("target does not commute with sigma_z (commutator norm {norm:.3e})")]
    TargetNotDiagonal { norm: f64 },

    #[error("special control is not a critical point: target does not commute with the drift (norm {norm:.3e})")]
    NotCritical { norm: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, LandscapeError>;

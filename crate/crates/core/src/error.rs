use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter failed its construction-time invariant.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The switch voltage never reaches the requested level inside the
    /// search horizon; the configuration does not oscillate through it.
    #[error("no crossing of {level} V within {t_max} s")]
    NoCrossing { level: f64, t_max: f64 },

    /// The turn-on map did not settle to a fixed point.
    #[error(
        "limit cycle not converged after {iterations} cycles \
         (last turn-on drift {residual} V)"
    )]
    CycleNotConverged { iterations: u32, residual: f64 },

    /// Requested integration step violates the stability/accuracy guard.
    #[error("time step {dt} s exceeds the step guard {max_dt} s")]
    StepTooLarge { dt: f64, max_dt: f64 },

    /// Integration produced a non-finite state, which signals invalid
    /// parameters rather than a solver fault.
    #[error("non-finite state at t = {t} s")]
    NonFinite { t: f64 },

    /// A frequency measurement ran out of time before seeing enough spikes.
    #[error("only {got} spikes observed, {need} required")]
    InsufficientSpikes { got: usize, need: usize },

    /// Damped least squares could not take a step even at maximum damping.
    #[error("normal equations singular (damping exhausted at {0:e})")]
    SingularFit(f64),

    /// Sub-step budget exhausted; the run is pathologically long or stiff.
    #[error("integration exceeded {0} sub-steps")]
    TooManySteps(u64),

    /// Config text could not be parsed.
    #[error("config parse error at line {line}, column {col}: {message}")]
    ConfigParse {
        line: usize,
        col: usize,
        message: String,
    },

    /// Parsed config violates a cross-field invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

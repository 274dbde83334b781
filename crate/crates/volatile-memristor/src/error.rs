//! Error type shared across the crate.

use crate::params::ValidationReport;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Model parameters violate one or more invariants.
    #[error("invalid model parameters: {0}")]
    InvalidParams(ValidationReport),

    /// A voltage argument was NaN or infinite.
    #[error("voltage is not finite: {0}")]
    NonFiniteVoltage(f64),

    /// `growth_rate` called with a voltage below the threshold; the
    /// fractional power is undefined there.
    #[error("voltage {v} V is below the threshold {v_th} V; growth rate is undefined")]
    BelowThreshold { v: f64, v_th: f64 },

    /// `decay_rate` called at a time where the stretched-exponential rate
    /// is singular or meaningless (t <= 0 with beta < 1, or t < 0).
    #[error("decay rate is singular at t_decay = {t_decay} s with beta = {beta}")]
    SingularDecayTime { t_decay: f64, beta: f64 },

    /// State variable outside `[x_off, x_on]`.
    #[error("state x = {x} outside [{lo}, {hi}]")]
    StateOutOfRange { x: f64, lo: f64, hi: f64 },

    /// Stimulus construction or validation failed.
    #[error("invalid stimulus: {0}")]
    InvalidStimulus(String),

    /// Solver configuration failed validation.
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    /// Stimulus sampling interval disagrees with the solver step.
    #[error("stimulus sample interval {stimulus} s does not equal solver dt {solver} s")]
    DtMismatch { stimulus: f64, solver: f64 },

    /// Retention threshold was not crossed within the configured horizon.
    #[error("retention threshold not reached within {horizon} s")]
    RetentionTimeout { horizon: f64 },

    /// Series lengths disagree where they must match.
    #[error("length mismatch: model series has {model} samples, target has {target}")]
    LengthMismatch { model: usize, target: usize },

    /// The reference current is identically zero; relative RMSE is undefined.
    #[error("target current series is identically zero")]
    ZeroTarget,

    /// Fit specification failed validation.
    #[error("invalid fit spec: {0}")]
    InvalidFitSpec(String),

    /// Parse error in a data file, with 1-based line number.
    #[error("{path}:{line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },

    /// File-level error that is not tied to a single line.
    #[error("{path}: {msg}")]
    File { path: String, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

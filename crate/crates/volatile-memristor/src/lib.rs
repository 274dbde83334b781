//! Behavioral modeling toolkit for volatile (threshold-switching)
//! memristors.
//!
//! A volatile memristor switches from its high-resistance state to a
//! low-resistance state when driven above a threshold voltage and
//! relaxes back on its own once the applied voltage drops below a hold
//! voltage. This crate models that behavior with a dimensionless
//! internal state variable `x`: above threshold, `x` grows at a rate set
//! by a power law of the overdrive; between the hold and threshold
//! voltages it is held; at or below the hold voltage it decays along a
//! stretched exponential. Resistance is linear in `x` between `r_off`
//! and `r_on`, and current follows Ohm's law.
//!
//! What's here:
//!
//! * [`params`] — parameter sets, invariant validation, and operating
//!   region classification.
//! * [`model`] — pure pointwise evaluation of the rate equations and
//!   the I-V relation.
//! * [`stimulus`] — piecewise-constant voltage waveforms.
//! * [`simulator`] — fixed-step transient simulation, closed-form
//!   growth/decay oracles, and retention-time measurement.
//! * [`fit`] — parameter extraction from a reference current trace by
//!   relative-RMSE minimization (simulated annealing + gradient
//!   descent).
//! * [`io`] — text file formats for parameters, stimuli, traces, and
//!   fit bounds.
//! * [`cli`] — the `vmem` command-line front end.
//!
//! The `examples/` directory has one runnable program per capability;
//! start with `transient`:
//!
//! ```bash
//! cargo run --release --example transient
//! ```

pub mod cli;
pub mod error;
pub mod fit;
pub mod io;
pub mod model;
pub mod params;
pub mod simulator;
pub mod stimulus;

pub use error::{Error, Result};
pub use fit::{
    fit as fit_params, relative_rmse, AnnealConfig, DescentConfig, FitParam, FitResult, FitSpec,
    FreeParam,
};
pub use model::{current, decay_rate, growth_rate, resistance, state_derivative};
pub use params::{classify_region, validate_params, ModelParams, Region, ValidationReport};
pub use simulator::{
    analytic_decay, analytic_growth, measure_retention, simulate, step, sweep_retention,
    switching_time, DecayStepping, DeviceState, SolverConfig, Trace,
};
pub use stimulus::Stimulus;

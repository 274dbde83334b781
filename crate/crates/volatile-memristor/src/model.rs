//! Pointwise evaluation of the state dynamics and the I-V relation.
//!
//! Everything here is a pure function of its arguments; the time
//! discretization lives in [`crate::simulator`].

use crate::error::{Error, Result};
use crate::params::{classify_region, ModelParams, Region};

/// Growth rate dx/dt (1/s) for `v >= v_th`:
///
/// ```text
/// dx/dt = k * (v / v_th - 1)^alpha
/// ```
///
/// Zero exactly at `v = v_th`, nonnegative and nondecreasing above it.
/// Voltages below the threshold are rejected; the fractional power of a
/// negative base is undefined.
pub fn growth_rate(v: f64, p: &ModelParams) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::NonFiniteVoltage(v));
    }
    if v < p.v_th {
        return Err(Error::BelowThreshold { v, v_th: p.v_th });
    }
    Ok(p.k * (v / p.v_th - 1.0).powf(p.alpha))
}

/// Decay rate dx/dt (1/s) of the stretched-exponential relaxation:
///
/// ```text
/// dx/dt = -x * beta * (t_decay / tau)^(beta - 1) / tau
/// ```
///
/// `t_decay` is the time elapsed since the most recent entry into the
/// decay region, not absolute simulation time. The rate is nonpositive
/// for `x >= 0` and proportional to `x`.
///
/// At `t_decay = 0` the rate is singular for `beta < 1` (rejected) and
/// equals the one-sided limit otherwise: 0 for `beta > 1`, `-x / tau`
/// for `beta = 1`. Negative `t_decay` is always rejected.
pub fn decay_rate(x: f64, t_decay: f64, p: &ModelParams) -> Result<f64> {
    if t_decay < 0.0 || (t_decay == 0.0 && p.beta < 1.0) {
        return Err(Error::SingularDecayTime {
            t_decay,
            beta: p.beta,
        });
    }
    if t_decay == 0.0 {
        return Ok(if p.beta > 1.0 { 0.0 } else { -x / p.tau });
    }
    Ok(-x * p.beta * (t_decay / p.tau).powf(p.beta - 1.0) / p.tau)
}

/// Piecewise state derivative, dispatching on the operating region:
/// decay for `v <= v_h`, zero hold band, growth for `v >= v_th`.
///
/// The derivative is additionally forced to zero at a bound the motion
/// would violate: growth at `x = x_on` and decay at `x = x_off` both
/// return 0, which is what pins `x` inside `[x_off, x_on]`.
pub fn state_derivative(x: f64, v: f64, t_decay: f64, p: &ModelParams) -> Result<f64> {
    match classify_region(v, p)? {
        Region::Hold => Ok(0.0),
        Region::Growth => {
            if x >= p.x_on {
                Ok(0.0)
            } else {
                growth_rate(v, p)
            }
        }
        Region::Decay => {
            if x <= p.x_off {
                Ok(0.0)
            } else {
                decay_rate(x, t_decay, p)
            }
        }
    }
}

/// Device resistance (Ω) for a state value, linear between the
/// endpoints: `r_on` at `x_on` and `r_off` at `x_off`.
pub fn resistance(x: f64, p: &ModelParams) -> Result<f64> {
    if !(x >= p.x_off && x <= p.x_on) {
        return Err(Error::StateOutOfRange {
            x,
            lo: p.x_off,
            hi: p.x_on,
        });
    }
    Ok(p.r_on + (p.r_off - p.r_on) / (p.x_off - p.x_on) * (x - p.x_on))
}

/// Device current (A): `i = v / R(x)`. Sign follows the voltage.
pub fn current(v: f64, x: f64, p: &ModelParams) -> Result<f64> {
    Ok(v / resistance(x, p)?)
}

//! Model parameters, validation, and operating-region classification.

use std::fmt;

use crate::error::{Error, Result};

/// Parameters of the volatile memristor behavioral model.
///
/// All values are in SI base units: volts, ohms, seconds. The internal
/// state variable `x` is dimensionless and confined to `[x_off, x_on]`,
/// so the growth prefactor `k` carries units of 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// State value in the low-resistance state (dimensionless).
    pub x_on: f64,
    /// State value in the high-resistance state (dimensionless).
    pub x_off: f64,
    /// Threshold voltage (V); at or above it the state grows.
    pub v_th: f64,
    /// Hold voltage (V); at or below it the state decays.
    pub v_h: f64,
    /// Low-resistance-state resistance (Ω).
    pub r_on: f64,
    /// High-resistance-state resistance (Ω).
    pub r_off: f64,
    /// Growth-rate prefactor (1/s).
    pub k: f64,
    /// Growth-rate exponent (dimensionless).
    pub alpha: f64,
    /// Decay time constant (s).
    pub tau: f64,
    /// Decay stretch exponent (dimensionless).
    pub beta: f64,
}

impl Default for ModelParams {
    /// Reference parameter set of a unipolar Ag-filament-style device:
    /// 1.8 V threshold, 1.4 V hold, 30 kΩ / 15 GΩ resistance window,
    /// 10 ms decay constant.
    fn default() -> Self {
        Self {
            x_on: 1.0,
            x_off: 0.0,
            v_th: 1.8,
            v_h: 1.4,
            r_on: 30e3,
            r_off: 15e9,
            k: 150.0,
            alpha: 0.45,
            tau: 10e-3,
            beta: 5.0,
        }
    }
}

/// One violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Field the violation is attributed to (its canonical file/CLI name).
    pub field: &'static str,
    /// The relation that must hold, e.g. `"v_th > v_h"`.
    pub requirement: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (field {})", self.requirement, self.field)
    }
}

/// Outcome of [`validate_params`]: empty means pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "pass");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every parameter invariant and reports all violations at once.
///
/// The report is the error channel: a non-empty violation list is the
/// "failure" outcome, no `Result` involved.
pub fn validate_params(p: &ModelParams) -> ValidationReport {
    let mut violations = Vec::new();
    let fields = [
        ("x_on", p.x_on),
        ("x_off", p.x_off),
        ("v_th", p.v_th),
        ("v_h", p.v_h),
        ("r_on", p.r_on),
        ("r_off", p.r_off),
        ("k", p.k),
        ("alpha", p.alpha),
        ("tau", p.tau),
        ("beta", p.beta),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            violations.push(Violation {
                field: name,
                requirement: "value must be finite",
            });
        }
    }
    let mut check = |ok: bool, field: &'static str, requirement: &'static str| {
        if !ok {
            violations.push(Violation { field, requirement });
        }
    };
    check(p.x_on > p.x_off, "x_on", "x_on > x_off");
    check(p.v_th > p.v_h, "v_th", "v_th > v_h");
    check(p.r_on > 0.0, "r_on", "r_on > 0");
    check(p.r_off > p.r_on, "r_off", "r_off > r_on");
    check(p.k > 0.0, "k", "k > 0");
    check(p.alpha > 0.0, "alpha", "alpha > 0");
    check(p.tau > 0.0, "tau", "tau > 0");
    check(p.beta > 0.0, "beta", "beta > 0");
    ValidationReport { violations }
}

impl ModelParams {
    /// Full invariant check; see [`validate_params`].
    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }

    /// Like [`ModelParams::validate`] but as a `Result` for use in
    /// pipelines that must stop on invalid parameters.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidParams(report))
        }
    }

    /// State range width `x_on - x_off`.
    pub fn x_range(&self) -> f64 {
        self.x_on - self.x_off
    }
}

/// Operating region selected by the applied voltage.
///
/// Exactly one region applies to every finite voltage. Boundaries follow
/// the defining inequalities: `v <= v_h` decays, `v >= v_th` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `v <= v_h`: the state relaxes back toward `x_off`.
    Decay,
    /// `v_h < v < v_th`: the state is held.
    Hold,
    /// `v >= v_th`: the state grows toward `x_on`.
    Growth,
}

/// Classifies the applied voltage into its operating region.
///
/// Comparisons use the signed voltage; for unipolar parameter sets with
/// `v_h > 0` every negative voltage classifies as `Decay`.
pub fn classify_region(v: f64, p: &ModelParams) -> Result<Region> {
    if !v.is_finite() {
        return Err(Error::NonFiniteVoltage(v));
    }
    Ok(if v <= p.v_h {
        Region::Decay
    } else if v >= p.v_th {
        Region::Growth
    } else {
        Region::Hold
    })
}

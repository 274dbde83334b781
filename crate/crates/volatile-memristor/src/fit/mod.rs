//! Parameter fitting against a reference current trace.
//!
//! The objective is the relative RMSE between the simulated and the
//! reference current under a shared stimulus. Minimization runs in two
//! phases: simulated annealing for the global search, then
//! finite-difference gradient descent to refine the annealing result.
//!
//! Search coordinates are transformed per parameter: `k`, `tau`, `r_on`
//! and `r_off` span decades and are searched in log10 space; voltages
//! and exponents stay linear.

mod anneal;
mod descent;

pub use anneal::{anneal_minimize, simulated_annealing, AnnealConfig};
pub use descent::{
    descent_minimize, finite_diff_gradient, gradient_descent, numeric_gradient, DescentConfig,
};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::simulator::{simulate, SolverConfig};
use crate::stimulus::Stimulus;

/// Relative root-mean-square error between a model current series and a
/// reference series:
///
/// ```text
/// e = sqrt( (1/N) * sum((i_model - i_target)^2) / sum(i_target^2) )
/// ```
///
/// i.e. `sqrt(1/N) * ||di||_2 / ||i_target||_2`. Zero iff the series are
/// identical. Errors on length mismatch, empty input, and an identically
/// zero reference.
pub fn relative_rmse(model: &[f64], target: &[f64]) -> Result<f64> {
    if model.len() != target.len() {
        return Err(Error::LengthMismatch {
            model: model.len(),
            target: target.len(),
        });
    }
    if target.is_empty() {
        return Err(Error::ZeroTarget);
    }
    let mut sum_d2 = 0.0;
    let mut sum_t2 = 0.0;
    for (&m, &t) in model.iter().zip(target) {
        let d = m - t;
        sum_d2 += d * d;
        sum_t2 += t * t;
    }
    if sum_t2 == 0.0 {
        return Err(Error::ZeroTarget);
    }
    Ok((sum_d2 / sum_t2 / model.len() as f64).sqrt())
}

/// A model parameter the fitter may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitParam {
    VTh,
    VH,
    K,
    Alpha,
    Tau,
    Beta,
    ROn,
    ROff,
}

impl FitParam {
    pub const ALL: [FitParam; 8] = [
        FitParam::VTh,
        FitParam::VH,
        FitParam::K,
        FitParam::Alpha,
        FitParam::Tau,
        FitParam::Beta,
        FitParam::ROn,
        FitParam::ROff,
    ];

    /// Canonical name, as used in parameter and bounds files.
    pub fn name(self) -> &'static str {
        match self {
            FitParam::VTh => "v_th",
            FitParam::VH => "v_h",
            FitParam::K => "k",
            FitParam::Alpha => "alpha",
            FitParam::Tau => "tau",
            FitParam::Beta => "beta",
            FitParam::ROn => "r_on",
            FitParam::ROff => "r_off",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Parameters spanning decades are searched in log10 space.
    pub fn log_scaled(self) -> bool {
        matches!(
            self,
            FitParam::K | FitParam::Tau | FitParam::ROn | FitParam::ROff
        )
    }

    pub fn get(self, p: &ModelParams) -> f64 {
        match self {
            FitParam::VTh => p.v_th,
            FitParam::VH => p.v_h,
            FitParam::K => p.k,
            FitParam::Alpha => p.alpha,
            FitParam::Tau => p.tau,
            FitParam::Beta => p.beta,
            FitParam::ROn => p.r_on,
            FitParam::ROff => p.r_off,
        }
    }

    pub fn set(self, p: &mut ModelParams, value: f64) {
        match self {
            FitParam::VTh => p.v_th = value,
            FitParam::VH => p.v_h = value,
            FitParam::K => p.k = value,
            FitParam::Alpha => p.alpha = value,
            FitParam::Tau => p.tau = value,
            FitParam::Beta => p.beta = value,
            FitParam::ROn => p.r_on = value,
            FitParam::ROff => p.r_off = value,
        }
    }

    /// Search-space coordinate of a raw value.
    pub fn transform(self, value: f64) -> f64 {
        if self.log_scaled() {
            value.log10()
        } else {
            value
        }
    }

    /// Raw value of a search-space coordinate.
    pub fn untransform(self, coord: f64) -> f64 {
        if self.log_scaled() {
            10f64.powf(coord)
        } else {
            coord
        }
    }

    /// Default search bounds around an initial guess: one decade each way
    /// for log-scaled parameters, `[0.5x, 2x]` for linear ones.
    pub fn default_bounds(self, initial: f64) -> (f64, f64) {
        if self.log_scaled() {
            (initial / 10.0, initial * 10.0)
        } else {
            (0.5 * initial, 2.0 * initial)
        }
    }
}

/// One free parameter with its raw-value search bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParam {
    pub param: FitParam,
    pub lower: f64,
    pub upper: f64,
}

impl FreeParam {
    pub fn new(param: FitParam, lower: f64, upper: f64) -> Self {
        Self {
            param,
            lower,
            upper,
        }
    }

    /// Free parameter with [`FitParam::default_bounds`] around `initial`.
    pub fn with_default_bounds(param: FitParam, initial: &ModelParams) -> Self {
        let (lower, upper) = param.default_bounds(param.get(initial));
        Self {
            param,
            lower,
            upper,
        }
    }
}

/// Everything a fit needs: the initial guess (which also fixes the
/// non-free parameters), the free parameters with bounds, the stimulus,
/// the reference current series, and the solver settings used for every
/// objective evaluation.
#[derive(Debug, Clone)]
pub struct FitSpec {
    pub initial: ModelParams,
    pub free: Vec<FreeParam>,
    pub stimulus: Stimulus,
    /// Reference current (A), one sample per recorded simulation sample.
    pub target: Vec<f64>,
    pub solver: SolverConfig,
}

impl FitSpec {
    pub fn new(
        initial: ModelParams,
        free: Vec<FreeParam>,
        stimulus: Stimulus,
        target: Vec<f64>,
        solver: SolverConfig,
    ) -> Result<Self> {
        let spec = Self {
            initial,
            free,
            stimulus,
            target,
            solver,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.ensure_valid()?;
        self.solver.validate()?;
        if self.stimulus.sample_interval != self.solver.dt {
            return Err(Error::DtMismatch {
                stimulus: self.stimulus.sample_interval,
                solver: self.solver.dt,
            });
        }
        for (idx, fp) in self.free.iter().enumerate() {
            if self.free[..idx].iter().any(|o| o.param == fp.param) {
                return Err(Error::InvalidFitSpec(format!(
                    "duplicate free parameter {}",
                    fp.param.name()
                )));
            }
            if !fp.lower.is_finite() || !fp.upper.is_finite() || fp.lower >= fp.upper {
                return Err(Error::InvalidFitSpec(format!(
                    "bounds for {} must be finite with lower < upper, got [{}, {}]",
                    fp.param.name(),
                    fp.lower,
                    fp.upper
                )));
            }
            if fp.param.log_scaled() && fp.lower <= 0.0 {
                return Err(Error::InvalidFitSpec(format!(
                    "{} is searched in log space and needs a positive lower bound, got {}",
                    fp.param.name(),
                    fp.lower
                )));
            }
            let init = fp.param.get(&self.initial);
            if init < fp.lower || init > fp.upper {
                return Err(Error::InvalidFitSpec(format!(
                    "initial {} = {} outside bounds [{}, {}]",
                    fp.param.name(),
                    init,
                    fp.lower,
                    fp.upper
                )));
            }
        }
        let expected = self.stimulus.len().div_ceil(self.solver.record_every);
        if self.target.len() != expected {
            return Err(Error::LengthMismatch {
                model: expected,
                target: self.target.len(),
            });
        }
        if self.target.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFitSpec(
                "target current contains non-finite samples".into(),
            ));
        }
        if self.target.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroTarget);
        }
        Ok(())
    }

    /// Search-space bounds of the free parameters, in order.
    pub fn transformed_bounds(&self) -> Vec<(f64, f64)> {
        self.free
            .iter()
            .map(|fp| (fp.param.transform(fp.lower), fp.param.transform(fp.upper)))
            .collect()
    }

    /// Search-space coordinates of a parameter set.
    pub fn position_of(&self, p: &ModelParams) -> Vec<f64> {
        self.free
            .iter()
            .map(|fp| fp.param.transform(fp.param.get(p)))
            .collect()
    }

    /// Parameter set at the given search-space coordinates; non-free
    /// parameters keep their initial values.
    pub fn params_at(&self, coords: &[f64]) -> ModelParams {
        let mut p = self.initial;
        for (fp, &c) in self.free.iter().zip(coords) {
            fp.param.set(&mut p, fp.param.untransform(c));
        }
        p
    }

    fn ensure_start_in_bounds(&self, start: &ModelParams) -> Result<()> {
        for fp in &self.free {
            let v = fp.param.get(start);
            if v < fp.lower || v > fp.upper {
                return Err(Error::InvalidFitSpec(format!(
                    "start value {} = {v} outside bounds [{}, {}]",
                    fp.param.name(),
                    fp.lower,
                    fp.upper
                )));
            }
        }
        Ok(())
    }
}

/// Fit objective: simulate the candidate from `x = x_off` under the
/// spec's stimulus and score against the target with [`relative_rmse`].
///
/// Candidates that violate the parameter invariants (or otherwise fail
/// to simulate) score `+inf` instead of erroring, so optimizers can
/// propose freely.
pub fn objective(candidate: &ModelParams, spec: &FitSpec) -> f64 {
    if !candidate.validate().is_valid() {
        return f64::INFINITY;
    }
    let trace = match simulate(candidate, &spec.stimulus, candidate.x_off, &spec.solver) {
        Ok(trace) => trace,
        Err(_) => return f64::INFINITY,
    };
    match relative_rmse(&trace.i, &spec.target) {
        Ok(e) if e.is_finite() => e,
        _ => f64::INFINITY,
    }
}

/// Iteration counts of the two fit phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseIterations {
    /// Objective evaluations spent in simulated annealing.
    pub annealing: usize,
    /// Accepted gradient-descent iterations.
    pub descent: usize,
}

/// Outcome of a fit (or of a single phase).
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub best_params: ModelParams,
    /// Relative RMSE of `best_params` against the target.
    pub best_error: f64,
    pub iterations: PhaseIterations,
    /// `(iteration, error)` at every improvement, phases concatenated.
    pub error_history: Vec<(usize, f64)>,
    pub rng_seed: u64,
}

/// Shared result of the closure-level minimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    /// Best coordinates found.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub error: f64,
    /// Objective evaluations (annealing) or accepted iterations (descent).
    pub iterations: usize,
    /// `(iteration, error)` at every improvement, starting with the
    /// initial value at iteration 0.
    pub history: Vec<(usize, f64)>,
}

/// Two-phase fit: simulated annealing from the spec's initial guess,
/// then gradient descent from the annealing optimum. Returns the better
/// of the two phase results with the concatenated error history.
pub fn fit(
    spec: &FitSpec,
    anneal_cfg: &AnnealConfig,
    descent_cfg: &DescentConfig,
) -> Result<FitResult> {
    let sa = simulated_annealing(spec, &spec.initial, anneal_cfg)?;
    let gd = gradient_descent(spec, &sa.best_params, descent_cfg)?;

    let mut history = sa.error_history.clone();
    history.extend(
        gd.error_history
            .iter()
            .map(|&(it, e)| (it + sa.iterations.annealing, e)),
    );
    // descent starts from the annealing optimum and only accepts
    // improvements, but take the minimum defensively
    let (best_params, best_error) = if gd.best_error <= sa.best_error {
        (gd.best_params, gd.best_error)
    } else {
        (sa.best_params, sa.best_error)
    };
    Ok(FitResult {
        best_params,
        best_error,
        iterations: PhaseIterations {
            annealing: sa.iterations.annealing,
            descent: gd.iterations.descent,
        },
        error_history: history,
        rng_seed: sa.rng_seed,
    })
}

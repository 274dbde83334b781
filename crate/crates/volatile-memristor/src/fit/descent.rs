//! Projected gradient descent on finite-difference gradients, with
//! backtracking on the learning rate.

use super::{FitResult, FitSpec, MinimizeResult, PhaseIterations};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Gradient-descent settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    /// Step size applied to the gradient, in search-space units.
    pub learning_rate: f64,
    /// Finite-difference step per coordinate, as a fraction of that
    /// coordinate's bound interval.
    pub finite_difference_step: f64,
    /// Maximum accepted iterations.
    pub max_iterations: usize,
    /// Stop once an accepted step improves the error by less than this.
    pub convergence_tolerance: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            finite_difference_step: 1e-2,
            max_iterations: 200,
            convergence_tolerance: 1e-12,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.finite_difference_step > 0.0
            && self.max_iterations > 0
            && self.convergence_tolerance > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "bad descent config: {self:?}"
            )))
        }
    }
}

/// Central-difference gradient of `f` with per-coordinate step
/// `rel_step * (upper - lower)`, falling back to a one-sided difference
/// when a probe would leave the bounds.
pub fn numeric_gradient<F>(mut f: F, x: &[f64], bounds: &[(f64, f64)], rel_step: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x.len(), bounds.len(), "one bound pair per coordinate");
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for j in 0..x.len() {
        let (lo, hi) = bounds[j];
        let h = rel_step * (hi - lo);
        let up_ok = x[j] + h <= hi;
        let down_ok = x[j] - h >= lo;
        let g = match (up_ok, down_ok) {
            (true, true) => {
                probe[j] = x[j] + h;
                let f_plus = f(&probe);
                probe[j] = x[j] - h;
                let f_minus = f(&probe);
                (f_plus - f_minus) / (2.0 * h)
            }
            (true, false) => {
                probe[j] = x[j] + h;
                let f_plus = f(&probe);
                probe[j] = x[j];
                (f_plus - f(&probe)) / h
            }
            (false, _) => {
                probe[j] = x[j] - h;
                let f_minus = f(&probe);
                probe[j] = x[j];
                (f(&probe) - f_minus) / h
            }
        };
        probe[j] = x[j];
        grad.push(g);
    }
    grad
}

/// Minimizes `f` over a box by projected gradient descent.
///
/// Each iteration takes a step of `learning_rate` times the numeric
/// gradient, clipped to the bounds. A step that would increase the error
/// is rejected and the learning rate halved instead (repeatedly if
/// needed), so the accepted-error sequence never increases. Stops at
/// `max_iterations`, when an accepted improvement falls below
/// `convergence_tolerance`, or when no decreasing step can be found.
pub fn descent_minimize<F>(
    mut f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    cfg: &DescentConfig,
) -> MinimizeResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = x0.to_vec();
    let mut e = f(&x);
    let mut history = vec![(0, e)];
    let mut lr = cfg.learning_rate;
    let mut iterations = 0usize;

    if !x.is_empty() && e.is_finite() {
        'outer: for iter in 1..=cfg.max_iterations {
            let grad = numeric_gradient(&mut f, &x, bounds, cfg.finite_difference_step);
            if grad.iter().all(|&g| g == 0.0) {
                break;
            }
            // backtracking: shrink the step until the error decreases
            let (candidate, e_new) = loop {
                let stepped: Vec<f64> = x
                    .iter()
                    .zip(&grad)
                    .zip(bounds)
                    .map(|((&xi, &gi), &(lo, hi))| (xi - lr * gi).clamp(lo, hi))
                    .collect();
                let e_stepped = f(&stepped);
                if e_stepped <= e {
                    break (stepped, e_stepped);
                }
                lr /= 2.0;
                if lr < 1e-18 {
                    break 'outer; // no decreasing step exists at any scale
                }
            };
            let improvement = e - e_new;
            x = candidate;
            e = e_new;
            iterations = iter;
            history.push((iter, e));
            if improvement < cfg.convergence_tolerance {
                break;
            }
        }
    }
    MinimizeResult {
        x,
        error: e,
        iterations,
        history,
    }
}

/// Finite-difference gradient of the fit objective with respect to the
/// free parameters, in their search-space coordinates.
pub fn finite_diff_gradient(
    spec: &FitSpec,
    candidate: &ModelParams,
    cfg: &DescentConfig,
) -> Result<Vec<f64>> {
    spec.validate()?;
    cfg.validate()?;
    spec.ensure_start_in_bounds(candidate)?;
    let bounds = spec.transformed_bounds();
    let x = spec.position_of(candidate);
    Ok(numeric_gradient(
        |coords| super::objective(&spec.params_at(coords), spec),
        &x,
        &bounds,
        cfg.finite_difference_step,
    ))
}

/// Gradient descent over a [`FitSpec`], starting from `start`.
pub fn gradient_descent(
    spec: &FitSpec,
    start: &ModelParams,
    cfg: &DescentConfig,
) -> Result<FitResult> {
    spec.validate()?;
    cfg.validate()?;
    spec.ensure_start_in_bounds(start)?;

    let bounds = spec.transformed_bounds();
    let x0 = spec.position_of(start);
    let result = descent_minimize(
        |x| super::objective(&spec.params_at(x), spec),
        &x0,
        &bounds,
        cfg,
    );

    Ok(FitResult {
        best_params: spec.params_at(&result.x),
        best_error: result.error,
        iterations: PhaseIterations {
            annealing: 0,
            descent: result.iterations,
        },
        error_history: result.history,
        rng_seed: 0,
    })
}

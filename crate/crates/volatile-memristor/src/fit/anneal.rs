//! Simulated annealing with Metropolis acceptance and geometric cooling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FitResult, FitSpec, MinimizeResult, PhaseIterations};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Annealing schedule and proposal settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig {
    /// Starting temperature, in objective units.
    pub initial_temperature: f64,
    /// Geometric cooling factor per temperature level, in (0, 1).
    pub cooling_rate: f64,
    /// Proposals evaluated at each temperature level.
    pub steps_per_temperature: usize,
    /// Proposal half-width as a fraction of each bound interval.
    pub proposal_scale: f64,
    /// Annealing stops once the temperature falls below this.
    pub min_temperature: f64,
    /// Seed of the (deterministic) random stream.
    pub rng_seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 0.1,
            cooling_rate: 0.95,
            steps_per_temperature: 20,
            proposal_scale: 0.25,
            min_temperature: 1e-6,
            rng_seed: 0,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.initial_temperature > 0.0
            && self.min_temperature > 0.0
            && self.min_temperature <= self.initial_temperature
            && self.cooling_rate > 0.0
            && self.cooling_rate < 1.0
            && self.steps_per_temperature > 0
            && self.proposal_scale > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad anneal config: {self:?}")))
        }
    }
}

/// Minimizes `f` over a box by simulated annealing.
///
/// Each proposal perturbs one randomly chosen coordinate by a uniform
/// step of half-width `proposal_scale * (upper - lower)`, clipped to the
/// bounds. Proposals are accepted when they improve, or with Metropolis
/// probability `exp(-de / T)` otherwise; the temperature cools
/// geometrically. The best point ever visited is returned, so the result
/// never scores worse than the start. Deterministic for a fixed seed.
pub fn anneal_minimize<F>(
    mut f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    cfg: &AnnealConfig,
) -> MinimizeResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), bounds.len(), "one bound pair per coordinate");
    let e0 = f(x0);
    let mut result = MinimizeResult {
        x: x0.to_vec(),
        error: e0,
        iterations: 0,
        history: vec![(0, e0)],
    };
    if x0.is_empty() {
        return result; // zero-width search: nothing to do
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut x = x0.to_vec();
    let mut e = e0;
    let mut evals = 0usize;
    let mut temperature = cfg.initial_temperature;

    while temperature >= cfg.min_temperature {
        for _ in 0..cfg.steps_per_temperature {
            let j = rng.gen_range(0..x.len());
            let (lo, hi) = bounds[j];
            let delta = (2.0 * rng.gen::<f64>() - 1.0) * cfg.proposal_scale * (hi - lo);
            let mut candidate = x.clone();
            candidate[j] = (candidate[j] + delta).clamp(lo, hi);
            let e_new = f(&candidate);
            evals += 1;

            let accept = e_new <= e || rng.gen::<f64>() < ((e - e_new) / temperature).exp();
            if accept {
                x = candidate;
                e = e_new;
                if e < result.error {
                    result.x.copy_from_slice(&x);
                    result.error = e;
                    result.history.push((evals, e));
                }
            }
        }
        temperature *= cfg.cooling_rate;
    }
    result.iterations = evals;
    result
}

/// Simulated annealing over a [`FitSpec`], starting from `start`.
pub fn simulated_annealing(
    spec: &FitSpec,
    start: &ModelParams,
    cfg: &AnnealConfig,
) -> Result<FitResult> {
    spec.validate()?;
    cfg.validate()?;
    spec.ensure_start_in_bounds(start)?;

    let bounds = spec.transformed_bounds();
    let x0 = spec.position_of(start);
    let result = anneal_minimize(
        |x| super::objective(&spec.params_at(x), spec),
        &x0,
        &bounds,
        cfg,
    );

    Ok(FitResult {
        best_params: spec.params_at(&result.x),
        best_error: result.error,
        iterations: PhaseIterations {
            annealing: result.iterations,
            descent: 0,
        },
        error_history: result.history,
        rng_seed: cfg.rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|&v| (v - 0.3) * (v - 0.3)).sum()
    }

    #[test]
    fn finds_the_sphere_minimum() {
        let cfg = AnnealConfig::default();
        let bounds = [(-2.0, 2.0), (-2.0, 2.0)];
        let r = anneal_minimize(sphere, &[1.5, -1.5], &bounds, &cfg);
        assert!(r.error < 1e-3, "error = {}", r.error);
        assert!((r.x[0] - 0.3).abs() < 0.05);
    }

    #[test]
    fn equal_seeds_give_identical_runs() {
        let cfg = AnnealConfig {
            rng_seed: 7,
            ..AnnealConfig::default()
        };
        let bounds = [(-2.0, 2.0), (-2.0, 2.0)];
        let a = anneal_minimize(sphere, &[1.5, -1.5], &bounds, &cfg);
        let b = anneal_minimize(sphere, &[1.5, -1.5], &bounds, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_explore_differently() {
        let bounds = [(-2.0, 2.0), (-2.0, 2.0)];
        let a = anneal_minimize(sphere, &[1.5, -1.5], &bounds, &AnnealConfig::default());
        let b = anneal_minimize(
            sphere,
            &[1.5, -1.5],
            &bounds,
            &AnnealConfig {
                rng_seed: 1,
                ..AnnealConfig::default()
            },
        );
        assert_ne!(a.history, b.history);
    }

    #[test]
    fn best_never_exceeds_the_start() {
        // even on a hostile oscillatory objective
        let f = |x: &[f64]| (20.0 * x[0]).sin() + 0.1 * x[0] * x[0];
        let cfg = AnnealConfig::default();
        let start = [1.7];
        let r = anneal_minimize(f, &start, &[(-3.0, 3.0)], &cfg);
        assert!(r.error <= f(&start));
        // history is an improvement log: strictly decreasing after the start
        for w in r.history.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn zero_width_search_returns_the_start() {
        let r = anneal_minimize(|_| 42.0, &[], &[], &AnnealConfig::default());
        assert_eq!(r.error, 42.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn config_validation() {
        assert!(AnnealConfig::default().validate().is_ok());
        let bad = AnnealConfig {
            cooling_rate: 1.0,
            ..AnnealConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AnnealConfig {
            initial_temperature: -1.0,
            ..AnnealConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}

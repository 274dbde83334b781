//! Fixed-step transient simulation of the state equation under a
//! voltage stimulus, plus closed-form oracles for constant-voltage
//! segments and retention-time measurement.

use crate::error::{Error, Result};
use crate::model::{decay_rate, growth_rate, resistance};
use crate::params::{classify_region, ModelParams, Region};
use crate::stimulus::Stimulus;

/// How the decay branch is integrated over a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayStepping {
    /// Multiplies the state by the exact stretched-exponential factor for
    /// the step interval. Exact at sample times for constant sub-hold
    /// voltage and free of the `beta < 1` onset singularity.
    ExactMultiplicative,
    /// Plain explicit Euler on the decay rate, with the rate evaluated at
    /// `max(t_decay, dt/2)` so the first step after release stays finite.
    /// First-order accurate; kept for cross-validation.
    ForwardEuler,
}

/// Fixed-step solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Step size (s); must equal the stimulus sample interval.
    pub dt: f64,
    /// Decay integration scheme.
    pub decay_stepping: DecayStepping,
    /// Record every n-th step (output decimation), at least 1.
    pub record_every: usize,
}

impl SolverConfig {
    /// Exact-multiplicative stepping at the given dt, recording every step.
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            decay_stepping: DecayStepping::ExactMultiplicative,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if self.record_every < 1 {
            return Err(Error::InvalidConfig("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Instantaneous simulation state.
///
/// `t_decay` is the decay clock: time elapsed since the most recent
/// transition into [`Region::Decay`]. It resets to zero on every entry
/// into the decay region and is only meaningful while decaying.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceState {
    /// Simulation clock (s).
    pub t: f64,
    /// Internal state variable, within `[x_off, x_on]`.
    pub x: f64,
    /// Decay clock (s).
    pub t_decay: f64,
    /// Region the state was last stepped in.
    pub region: Region,
    // Step count backing t_decay. Computing t_decay as count * dt keeps a
    // single rounding regardless of episode length, which the decay-oracle
    // tolerance of 1e-12 needs; a += dt running sum drifts past it.
    decay_steps: u64,
}

impl DeviceState {
    /// Fresh state at `t = 0` with the given initial `x`. The region
    /// starts as `Hold`, so a first sub-hold sample counts as an entry
    /// into decay and starts the decay clock at zero.
    pub fn new(x0: f64) -> Self {
        Self {
            t: 0.0,
            x: x0,
            t_decay: 0.0,
            region: Region::Hold,
            decay_steps: 0,
        }
    }
}

/// Uniformly sampled simulation record.
///
/// Sample `k` holds the state at `t0 + k * dt` together with the voltage
/// applied from that instant and the resulting Ohm-law current and
/// resistance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Time of the first sample (s).
    pub t0: f64,
    /// Sample spacing (s).
    pub dt: f64,
    /// Applied voltage (V).
    pub v: Vec<f64>,
    /// Device current (A).
    pub i: Vec<f64>,
    /// Internal state variable.
    pub x: Vec<f64>,
    /// Device resistance (Ω).
    pub r: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Time of sample `k` (s).
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }
}

/// Advances the state by one step of `cfg.dt` under the applied voltage.
///
/// The region is reclassified from `v` first; a transition into decay
/// resets the decay clock. Growth uses a plain forward step clamped at
/// `x_on` (exact for piecewise-constant voltage, since the growth rate
/// does not depend on `x`). Decay advances per `cfg.decay_stepping`,
/// floored at `x_off`. The decay clock only advances while decaying.
pub fn step(
    state: &DeviceState,
    v: f64,
    p: &ModelParams,
    cfg: &SolverConfig,
) -> Result<DeviceState> {
    let dt = cfg.dt;
    let region = classify_region(v, p)?;
    let mut next = *state;
    next.region = region;
    match region {
        Region::Hold => {}
        Region::Growth => {
            let rate = growth_rate(v, p)?;
            next.x = (state.x + rate * dt).min(p.x_on);
        }
        Region::Decay => {
            let steps = if state.region == Region::Decay {
                state.decay_steps
            } else {
                0 // entry into decay: clock restarts
            };
            let t0 = steps as f64 * dt;
            let t1 = (steps + 1) as f64 * dt;
            match cfg.decay_stepping {
                DecayStepping::ExactMultiplicative => {
                    let factor = ((t0 / p.tau).powf(p.beta) - (t1 / p.tau).powf(p.beta)).exp();
                    next.x = (state.x * factor).max(p.x_off);
                }
                DecayStepping::ForwardEuler => {
                    let rate = decay_rate(state.x, t0.max(dt / 2.0), p)?;
                    next.x = (state.x + rate * dt).max(p.x_off);
                }
            }
            next.decay_steps = steps + 1;
            next.t_decay = t1;
        }
    }
    next.t = state.t + dt;
    Ok(next)
}

/// Runs the stimulus through [`step`] and records `(t, v, i, x, r)`
/// every `cfg.record_every` steps. Sample `k` of the trace holds the
/// state *before* the recorded voltage acts, so the first sample is the
/// initial condition. Deterministic: identical inputs give bit-identical
/// traces.
pub fn simulate(p: &ModelParams, stim: &Stimulus, x0: f64, cfg: &SolverConfig) -> Result<Trace> {
    p.ensure_valid()?;
    cfg.validate()?;
    if !(x0 >= p.x_off && x0 <= p.x_on) {
        return Err(Error::StateOutOfRange {
            x: x0,
            lo: p.x_off,
            hi: p.x_on,
        });
    }
    if stim.sample_interval != cfg.dt {
        return Err(Error::DtMismatch {
            stimulus: stim.sample_interval,
            solver: cfg.dt,
        });
    }
    let n_rec = stim.len().div_ceil(cfg.record_every);
    let mut trace = Trace {
        t0: 0.0,
        dt: cfg.dt * cfg.record_every as f64,
        v: Vec::with_capacity(n_rec),
        i: Vec::with_capacity(n_rec),
        x: Vec::with_capacity(n_rec),
        r: Vec::with_capacity(n_rec),
    };
    let mut state = DeviceState::new(x0);
    for (k, &v) in stim.samples.iter().enumerate() {
        if k % cfg.record_every == 0 {
            let r = resistance(state.x, p)?;
            trace.v.push(v);
            trace.i.push(v / r);
            trace.x.push(state.x);
            trace.r.push(r);
        }
        state = step(&state, v, p, cfg)?;
    }
    Ok(trace)
}

/// Closed-form state under constant `v >= v_th` for time `t`, clamped at
/// `x_on`. Serves as the growth oracle: the fixed-step integrator must
/// match it at sample times for piecewise-constant stimuli.
pub fn analytic_growth(x0: f64, v: f64, t: f64, p: &ModelParams) -> Result<f64> {
    let rate = growth_rate(v, p)?;
    Ok((x0 + rate * t).min(p.x_on))
}

/// Closed-form stretched-exponential decay, `x0 * exp(-(t/tau)^beta)`,
/// with `t_decay` measured from the entry into the decay region.
pub fn analytic_decay(x0: f64, t_decay: f64, p: &ModelParams) -> f64 {
    x0 * (-(t_decay / p.tau).powf(p.beta)).exp()
}

/// Time at which the simulated state first reaches `x_on`, linearly
/// extrapolated from the last strictly-growing sample interval so the
/// clamp does not quantize the answer to the sample grid. `None` if the
/// trace never reaches `x_on`.
pub fn switching_time(trace: &Trace, x_on: f64) -> Option<f64> {
    let k = trace.x.iter().position(|&x| x >= x_on)?;
    if k == 0 {
        return Some(trace.time(0));
    }
    if k >= 2 {
        let slope = trace.x[k - 1] - trace.x[k - 2];
        if slope > 0.0 {
            let t = trace.time(k - 1) + (x_on - trace.x[k - 1]) / slope * trace.dt;
            // the crossing cannot be later than the sample that reached x_on
            return Some(t.min(trace.time(k)));
        }
    }
    Some(trace.time(k))
}

/// Simulates pure decay from `x_start` and returns the first time the
/// state falls to `x_off + fraction * (x_on - x_off)`, linearly
/// interpolated between the bracketing samples.
///
/// For `x_start = x_on` and `x_off = 0` the analytic value is
/// `tau * ln(1/fraction)^(1/beta)`. Errors with
/// [`Error::RetentionTimeout`] if the threshold is not crossed within
/// `horizon` seconds.
pub fn measure_retention(
    p: &ModelParams,
    x_start: f64,
    fraction: f64,
    cfg: &SolverConfig,
    horizon: f64,
) -> Result<f64> {
    p.ensure_valid()?;
    cfg.validate()?;
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "retention fraction must lie strictly inside (0, 1), got {fraction}"
        )));
    }
    if !(x_start > p.x_off && x_start <= p.x_on) {
        return Err(Error::StateOutOfRange {
            x: x_start,
            lo: p.x_off,
            hi: p.x_on,
        });
    }
    let threshold = p.x_off + fraction * p.x_range();
    if x_start <= threshold {
        return Ok(0.0);
    }
    let v = p.v_h - 1.0; // any sub-hold level; decay is voltage-independent
    let mut state = DeviceState::new(x_start);
    let mut prev_x = x_start;
    let mut k: u64 = 0;
    loop {
        state = step(&state, v, p, cfg)?;
        k += 1;
        if state.x <= threshold {
            let t_prev = (k - 1) as f64 * cfg.dt;
            return Ok(t_prev + cfg.dt * (prev_x - threshold) / (prev_x - state.x));
        }
        if k as f64 * cfg.dt > horizon {
            return Err(Error::RetentionTimeout { horizon });
        }
        prev_x = state.x;
    }
}

/// Generous simulation horizon for a retention measurement: ten times
/// the analytic crossing estimate when it exists, with a floor of
/// `10 * tau`.
pub fn retention_horizon(p: &ModelParams, x_start: f64, fraction: f64) -> f64 {
    let threshold = p.x_off + fraction * p.x_range();
    let floor = 10.0 * p.tau;
    if threshold <= 0.0 || x_start <= threshold {
        return floor;
    }
    // decay relaxes toward zero: x(t) = x_start * exp(-(t/tau)^beta)
    let t_est = p.tau * (x_start / threshold).ln().powf(1.0 / p.beta);
    (10.0 * t_est).max(floor)
}

/// Measures retention (from `x_on`, per [`measure_retention`]) for each
/// decay constant in `tau_list` with every other parameter fixed.
/// Output order matches the input.
pub fn sweep_retention(
    p: &ModelParams,
    tau_list: &[f64],
    fraction: f64,
    cfg: &SolverConfig,
) -> Result<Vec<(f64, f64)>> {
    if tau_list.is_empty() {
        return Err(Error::InvalidConfig("empty tau list".into()));
    }
    let mut out = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        let p_tau = ModelParams { tau, ..*p };
        p_tau.ensure_valid()?;
        let horizon = retention_horizon(&p_tau, p_tau.x_on, fraction);
        let retention = measure_retention(&p_tau, p_tau.x_on, fraction, cfg, horizon)?;
        out.push((tau, retention));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn growth_step_matches_rate_times_dt() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-3);
        let s = step(&DeviceState::new(0.0), 3.0, &p, &cfg).unwrap();
        assert!(rel_err(s.x, 0.12498278345390679) < 1e-12, "x = {}", s.x);
        assert_eq!(s.region, Region::Growth);
    }

    #[test]
    fn hold_step_leaves_x_untouched() {
        let p = ModelParams::default();
        for &dt in &[1e-6, 1e-3, 1.0] {
            let cfg = SolverConfig::new(dt);
            let s = step(&DeviceState::new(0.5), 1.5, &p, &cfg).unwrap();
            assert_eq!(s.x, 0.5);
        }
    }

    #[test]
    fn first_decay_step_is_the_stretched_exponential() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(10e-3); // (dt/tau)^beta = 1
        let s = step(&DeviceState::new(1.0), -1.0, &p, &cfg).unwrap();
        assert!(rel_err(s.x, (-1.0f64).exp()) < 1e-15, "x = {}", s.x);
        assert_eq!(s.t_decay, 10e-3);
    }

    #[test]
    fn decay_clock_resets_on_reentry() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-3);
        let mut s = DeviceState::new(1.0);
        s = step(&s, -1.0, &p, &cfg).unwrap(); // enter decay
        s = step(&s, -1.0, &p, &cfg).unwrap();
        assert_eq!(s.t_decay, 2e-3);
        s = step(&s, 1.5, &p, &cfg).unwrap(); // hold: clock frozen
        assert_eq!(s.t_decay, 2e-3);
        s = step(&s, -1.0, &p, &cfg).unwrap(); // re-entry: clock restarted
        assert_eq!(s.t_decay, 1e-3);
    }

    #[test]
    fn non_finite_voltage_is_rejected_by_step() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-3);
        assert!(step(&DeviceState::new(0.0), f64::NAN, &p, &cfg).is_err());
    }

    #[test]
    fn simulate_reproduces_the_apply_then_release_transient() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(20e-3, 3.0), (80e-3, -1.0)], 10e-6).unwrap();
        let cfg = SolverConfig::new(10e-6);
        let trace = simulate(&p, &stim, 0.0, &cfg).unwrap();
        assert_eq!(trace.len(), 10_000);

        let t_sw = switching_time(&trace, p.x_on).expect("x_on not reached");
        assert!(rel_err(t_sw, 8.001102010732514e-3) < 1e-9, "t_sw = {t_sw}");

        // 100 uA on-current during the pulse once switched
        let i_max = trace.i.iter().cloned().fold(f64::MIN, f64::max);
        assert!(rel_err(i_max, 1e-4) < 1e-12);
        // decays toward -1 V / 15 GOhm
        let i_final = *trace.i.last().unwrap();
        assert!(rel_err(i_final, -1.0 / 15e9) < 1e-6, "i_final = {i_final}");
    }

    #[test]
    fn simulate_zero_volts_keeps_zero_state() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(10e-3, 0.0)], 1e-4).unwrap();
        let trace = simulate(&p, &stim, 0.0, &SolverConfig::new(1e-4)).unwrap();
        assert!(trace.x.iter().all(|&x| x == 0.0));
        assert!(trace.i.iter().all(|&i| i == 0.0));
    }

    #[test]
    fn simulate_hold_keeps_state_exactly() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(50e-3, 1.5)], 1e-4).unwrap();
        let trace = simulate(&p, &stim, 0.7, &SolverConfig::new(1e-4)).unwrap();
        assert!(trace.x.iter().all(|&x| x == 0.7));
    }

    #[test]
    fn simulate_checks_x0_and_dt() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(1e-3, 0.0)], 1e-4).unwrap();
        assert!(simulate(&p, &stim, 1.5, &SolverConfig::new(1e-4)).is_err());
        assert!(matches!(
            simulate(&p, &stim, 0.0, &SolverConfig::new(2e-4)),
            Err(Error::DtMismatch { .. })
        ));
    }

    #[test]
    fn record_every_decimates_the_trace() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(10e-3, 1.5)], 1e-4).unwrap();
        let cfg = SolverConfig {
            record_every: 10,
            ..SolverConfig::new(1e-4)
        };
        let trace = simulate(&p, &stim, 0.2, &cfg).unwrap();
        assert_eq!(trace.len(), 10);
        assert_eq!(trace.dt, 1e-3);
    }

    #[test]
    fn simulate_is_deterministic() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(5e-3, 3.0), (20e-3, -1.0)], 1e-5).unwrap();
        let cfg = SolverConfig::new(1e-5);
        let a = simulate(&p, &stim, 0.0, &cfg).unwrap();
        let b = simulate(&p, &stim, 0.0, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn euler_growth_matches_the_analytic_oracle() {
        // growth rate is independent of x, so Euler is exact per step
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(6e-3, 3.0)], 1e-5).unwrap();
        let cfg = SolverConfig {
            decay_stepping: DecayStepping::ForwardEuler,
            ..SolverConfig::new(1e-5)
        };
        let trace = simulate(&p, &stim, 0.0, &cfg).unwrap();
        for k in 0..trace.len() {
            let oracle = analytic_growth(0.0, 3.0, trace.time(k), &p).unwrap();
            assert!(rel_err(trace.x[k], oracle) <= 1e-9, "sample {k}");
        }
    }

    #[test]
    fn analytic_growth_reference_values() {
        let p = ModelParams::default();
        // clamped to x_on just past the switching time
        assert_eq!(analytic_growth(0.0, 3.0, 8.1e-3, &p).unwrap(), 1.0);
        // zero rate at the threshold
        assert_eq!(analytic_growth(0.3, p.v_th, 5.0, &p).unwrap(), 0.3);
        // rate is exactly k at v = 2 * v_th
        let x = analytic_growth(0.0, 3.6, 1e-3, &p).unwrap();
        assert!(rel_err(x, 0.15) < 1e-12);
        assert!(analytic_growth(0.0, 1.0, 1e-3, &p).is_err());
    }

    #[test]
    fn analytic_decay_reference_values() {
        let p = ModelParams::default();
        let e = (-1.0f64).exp();
        assert!(rel_err(analytic_decay(1.0, p.tau, &p), e) < 1e-15);
        assert_eq!(analytic_decay(1.0, 0.0, &p), 1.0);
        // (20ms / 10ms)^5 = 32
        let x = analytic_decay(0.8, 20e-3, &p);
        assert!(rel_err(x, 0.8 * (-32.0f64).exp()) < 1e-15);
    }

    #[test]
    fn exact_decay_tracks_the_oracle_at_every_sample() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(&[(50e-3, -1.0)], 1e-4).unwrap();
        let trace = simulate(&p, &stim, 1.0, &SolverConfig::new(1e-4)).unwrap();
        for k in 0..trace.len() {
            let oracle = analytic_decay(1.0, trace.time(k), &p);
            let err = if oracle > 1e-250 {
                rel_err(trace.x[k], oracle)
            } else {
                trace.x[k]
            };
            assert!(
                err <= 1e-12,
                "sample {k}: x = {}, oracle = {oracle}",
                trace.x[k]
            );
        }
    }

    #[test]
    fn state_stays_bounded_and_monotone_per_region() {
        let p = ModelParams::default();
        let stim = Stimulus::from_segments(
            &[
                (5e-3, 3.0),
                (10e-3, -1.0),
                (3e-3, 1.5),
                (10e-3, 2.5),
                (30e-3, 0.0),
            ],
            1e-5,
        )
        .unwrap();
        let cfg = SolverConfig::new(1e-5);
        let trace = simulate(&p, &stim, 0.1, &cfg).unwrap();
        for k in 0..trace.len() {
            assert!(trace.x[k] >= p.x_off && trace.x[k] <= p.x_on);
            if k > 0 {
                match classify_region(trace.v[k - 1], &p).unwrap() {
                    Region::Growth => assert!(trace.x[k] >= trace.x[k - 1]),
                    Region::Decay => assert!(trace.x[k] <= trace.x[k - 1]),
                    Region::Hold => assert_eq!(trace.x[k], trace.x[k - 1]),
                }
            }
        }
    }

    #[test]
    fn retention_matches_the_analytic_inversion() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-5);
        let horizon = retention_horizon(&p, 1.0, 0.1);
        let t = measure_retention(&p, 1.0, 0.1, &cfg, horizon).unwrap();
        let oracle = p.tau * (10.0f64.ln()).powf(1.0 / p.beta); // 11.815 ms
        assert!(rel_err(t, oracle) < 1e-4, "t = {t}, oracle = {oracle}");
    }

    #[test]
    fn retention_rejects_degenerate_fractions() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-5);
        assert!(measure_retention(&p, 1.0, 1.0, &cfg, 1.0).is_err());
        assert!(measure_retention(&p, 1.0, 0.0, &cfg, 1.0).is_err());
    }

    #[test]
    fn retention_times_out_when_unreachable() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-4);
        let result = measure_retention(&p, 1.0, 0.1, &cfg, 1e-3);
        assert!(matches!(result, Err(Error::RetentionTimeout { .. })));
    }

    #[test]
    fn sweep_scales_linearly_in_tau_and_preserves_order() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-5);
        let taus: Vec<f64> = (1..=10).map(|i| i as f64 * 10e-3).collect();
        let sweep = sweep_retention(&p, &taus, 0.1, &cfg).unwrap();
        assert_eq!(sweep.len(), 10);
        let ratio0 = sweep[0].1 / sweep[0].0;
        for w in sweep.windows(2) {
            assert!(w[1].1 > w[0].1, "retention must increase with tau");
        }
        for &(tau, ret) in &sweep {
            assert!(rel_err(ret / tau, ratio0) < 1e-2, "tau = {tau}");
        }
        // duplicate entries give identical results
        let dup = sweep_retention(&p, &[10e-3, 10e-3], 0.1, &cfg).unwrap();
        assert_eq!(dup[0].1, dup[1].1);
        // a single-element list gives a single pair
        let single = sweep_retention(&p, &[10e-3], 0.1, &cfg).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0], dup[0]);
        assert!(sweep_retention(&p, &[], 0.1, &cfg).is_err());
    }

    #[test]
    fn retention_decreases_with_beta_below_inverse_e() {
        let p = ModelParams::default();
        let cfg = SolverConfig::new(1e-5);
        let f = 0.1; // < 1/e
        let mut prev = f64::MAX;
        for &beta in &[1.0, 2.0, 3.0, 5.0, 8.0] {
            let pb = ModelParams { beta, ..p };
            let horizon = retention_horizon(&pb, 1.0, f);
            let t = measure_retention(&pb, 1.0, f, &cfg, horizon).unwrap();
            assert!(t < prev, "beta = {beta}");
            prev = t;
        }
    }
}

//! The two decay integration schemes side by side: the exact
//! multiplicative stepper tracks the closed-form stretched exponential
//! to machine precision at any dt, while forward Euler converges to it
//! at first order as dt shrinks.
//!
//! ```bash
//! cargo run --release --example decay_stepping
//! ```

use volatile_memristor::params::ModelParams;
use volatile_memristor::simulator::{analytic_decay, simulate, DecayStepping, SolverConfig};
use volatile_memristor::stimulus::Stimulus;

fn max_abs_err(p: &ModelParams, stepping: DecayStepping, dt: f64) -> f64 {
    let n = (5.0 * p.tau / dt).round() as usize + 1;
    let stim = Stimulus::new(dt, vec![0.0; n]).unwrap();
    let cfg = SolverConfig {
        decay_stepping: stepping,
        ..SolverConfig::new(dt)
    };
    let trace = simulate(p, &stim, 1.0, &cfg).unwrap();
    (0..trace.len())
        .map(|k| (trace.x[k] - analytic_decay(1.0, trace.time(k), p)).abs())
        .fold(0.0, f64::max)
}

fn main() {
    let p = ModelParams {
        tau: 1.0,
        beta: 2.14262,
        ..ModelParams::default()
    };
    println!(
        "decay from x = 1 over 5 tau (tau = {} s, beta = {}), max |x - exact|:",
        p.tau, p.beta
    );
    println!(
        "{:>12} {:>16} {:>16}",
        "dt", "exact stepper", "forward Euler"
    );
    let mut prev_euler = None;
    for exp in 0..5 {
        let dt = p.tau / (500.0 * 2f64.powi(exp));
        let exact = max_abs_err(&p, DecayStepping::ExactMultiplicative, dt);
        let euler = max_abs_err(&p, DecayStepping::ForwardEuler, dt);
        let order = prev_euler
            .map(|prev: f64| format!("  ({:.3}x)", prev / euler))
            .unwrap_or_default();
        println!("{dt:>12.3e} {exact:>16.3e} {euler:>16.3e}{order}");
        prev_euler = Some(euler);
    }
    println!("(the Euler column halves with dt; the exact column is rounding noise)");
}

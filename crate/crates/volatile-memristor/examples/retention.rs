//! Retention time as a function of the decay constant tau: sweep tau
//! from 10 ms to 100 ms and report how long the device stays above 10%
//! of its state range after release.
//!
//! ```bash
//! cargo run --release --example retention
//! ```

use volatile_memristor::params::ModelParams;
use volatile_memristor::simulator::{sweep_retention, SolverConfig};

fn main() {
    let p = ModelParams::default();
    let fraction = 0.1;
    let taus: Vec<f64> = (1..=10).map(|i| i as f64 * 10e-3).collect();
    let cfg = SolverConfig::new(1e-5);

    let sweep = sweep_retention(&p, &taus, fraction, &cfg).unwrap();

    // for x(t) = exp(-(t/tau)^beta) the crossing sits at
    // tau * ln(1/f)^(1/beta), so retention/tau is constant in tau
    let analytic_ratio = (1.0 / fraction).ln().powf(1.0 / p.beta);
    println!(
        "retention to {:.0}% of the state range (beta = {}):",
        fraction * 100.0,
        p.beta
    );
    println!(
        "{:>10} {:>16} {:>14}",
        "tau [ms]", "retention [ms]", "retention/tau"
    );
    for (tau, retention) in &sweep {
        println!(
            "{:>10.1} {:>16.4} {:>14.5}",
            tau * 1e3,
            retention * 1e3,
            retention / tau
        );
    }
    println!("analytic ratio: {analytic_ratio:.5}");
}

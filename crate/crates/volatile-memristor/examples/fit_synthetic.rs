//! Parameter extraction demo: generate a reference current trace from a
//! known parameter set, then recover the decay parameters from a wrong
//! initial guess by annealing + gradient descent.
//!
//! ```bash
//! cargo run --release --example fit_synthetic
//! ```

use volatile_memristor::fit::{
    fit, objective, AnnealConfig, DescentConfig, FitParam, FitSpec, FreeParam,
};
use volatile_memristor::params::ModelParams;
use volatile_memristor::simulator::{simulate, SolverConfig};
use volatile_memristor::stimulus::Stimulus;

fn main() {
    // the "device" we pretend to characterize
    let truth = ModelParams {
        tau: 40e-3,
        beta: 3.0,
        ..ModelParams::default()
    };
    // switch it on, then watch it relax
    let dt = 1e-4;
    let stim = Stimulus::from_segments(&[(15e-3, 3.0), (150e-3, -1.0)], dt).unwrap();
    let solver = SolverConfig::new(dt);
    let target = simulate(&truth, &stim, truth.x_off, &solver).unwrap().i;

    // initial guess: the stock parameter set (tau = 10 ms, beta = 5)
    let initial = ModelParams::default();
    let free = vec![
        FreeParam::with_default_bounds(FitParam::Tau, &initial),
        FreeParam::with_default_bounds(FitParam::Beta, &initial),
    ];
    let spec = FitSpec::new(initial, free, stim, target, solver).unwrap();

    println!("initial objective: {:.4e}", objective(&initial, &spec));
    let result = fit(&spec, &AnnealConfig::default(), &DescentConfig::default()).unwrap();

    println!(
        "final objective:   {:.4e}  ({} annealing evaluations, {} descent iterations)",
        result.best_error, result.iterations.annealing, result.iterations.descent
    );
    println!("{:>8} {:>12} {:>12}", "param", "truth", "recovered");
    println!(
        "{:>8} {:>12.5} {:>12.5}",
        "tau", truth.tau, result.best_params.tau
    );
    println!(
        "{:>8} {:>12.5} {:>12.5}",
        "beta", truth.beta, result.best_params.beta
    );
}

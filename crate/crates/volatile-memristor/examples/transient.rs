//! Apply-then-release transient: drive the device above threshold until
//! it switches to the low-resistance state, then release it below the
//! hold voltage and watch the state decay back.
//!
//! ```bash
//! cargo run --release --example transient [output-dir]
//! ```
//!
//! Writes `transient.csv` (plot-ready: time_s, voltage_V, current_A,
//! state_x, resistance_ohm) into the output directory (default: the
//! current directory).

use std::path::PathBuf;

use volatile_memristor::io::write_trace;
use volatile_memristor::params::ModelParams;
use volatile_memristor::simulator::{simulate, switching_time, SolverConfig};
use volatile_memristor::stimulus::Stimulus;

fn main() {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let p = ModelParams::default();

    // 3 V (above the 1.8 V threshold) for 20 ms, then -1 V (below the
    // 1.4 V hold voltage) for 80 ms, sampled every 10 us
    let dt = 10e-6;
    let stim = Stimulus::from_segments(&[(20e-3, 3.0), (80e-3, -1.0)], dt).unwrap();
    let trace = simulate(&p, &stim, p.x_off, &SolverConfig::new(dt)).unwrap();

    let path = out_dir.join("transient.csv");
    write_trace(&trace, &path).unwrap();

    let i_max = trace.i.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let i_final = *trace.i.last().unwrap();
    println!("wrote {} samples to {}", trace.len(), path.display());
    match switching_time(&trace, p.x_on) {
        Some(t) => println!("switched to LRS after {:.4} ms", t * 1e3),
        None => println!("x_on not reached"),
    }
    println!(
        "on-current {:.1} uA, final current {:.3} nA",
        i_max * 1e6,
        i_final * 1e9
    );
    println!("final state x = {:.3e}", trace.x.last().unwrap());
}

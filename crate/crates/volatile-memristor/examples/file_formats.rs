//! The three data formats in one place: write a parameter file, a
//! stimulus, and a simulated trace, then read everything back.
//!
//! ```bash
//! cargo run --release --example file_formats [output-dir]
//! ```

use std::path::PathBuf;

use volatile_memristor::io::{
    params_to_string, read_params, read_stimulus, read_trace, write_params, write_stimulus,
    write_trace,
};
use volatile_memristor::params::ModelParams;
use volatile_memristor::simulator::{simulate, SolverConfig};
use volatile_memristor::stimulus::Stimulus;

fn main() {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let p = ModelParams::default();

    let params_path = out_dir.join("device.params");
    write_params(&p, &params_path).unwrap();
    println!("--- {} ---", params_path.display());
    print!("{}", params_to_string(&p));

    let dt = 1e-4;
    let stim = Stimulus::from_segments(&[(10e-3, 3.0), (40e-3, -1.0)], dt).unwrap();
    let stim_path = out_dir.join("pulse.stim.csv");
    write_stimulus(&stim, &stim_path).unwrap();

    let trace = simulate(&p, &stim, p.x_off, &SolverConfig::new(dt)).unwrap();
    let trace_path = out_dir.join("pulse.trace.csv");
    write_trace(&trace, &trace_path).unwrap();

    // round-trip: everything parses back to exactly what was written
    assert_eq!(read_params(&params_path).unwrap(), p);
    assert_eq!(read_stimulus(&stim_path, None).unwrap(), stim);
    assert_eq!(read_trace(&trace_path).unwrap(), trace);

    println!("--- round-trip ---");
    println!("{}: ok", params_path.display());
    println!("{}: ok ({} samples)", stim_path.display(), stim.len());
    println!("{}: ok ({} samples)", trace_path.display(), trace.len());
}

//! Behavior of the `vmem` binary: exit codes, output discipline, and
//! the per-subcommand error paths.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

use volatile_memristor::io;
use volatile_memristor::params::ModelParams;
use volatile_memristor::stimulus::Stimulus;

fn vmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmem"))
        .args(args)
        .output()
        .expect("failed to launch vmem")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

fn write_default_params(dir: &Path) -> String {
    let path = dir.join("params.txt");
    io::write_params(&ModelParams::default(), &path).unwrap();
    path.display().to_string()
}

fn write_pulse_stimulus(dir: &Path) -> String {
    let path = dir.join("stim.csv");
    let stim = Stimulus::from_segments(&[(5e-3, 3.0), (10e-3, -1.0)], 1e-4).unwrap();
    io::write_stimulus(&stim, &path).unwrap();
    path.display().to_string()
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = vmem(&["simulate", "--params", "p.txt", "--out", "t.csv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = vmem(&["frobnicate"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn help_exits_zero() {
    let out = vmem(&["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn simulate_writes_trace_and_summary() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim = write_pulse_stimulus(dir.path());
    let trace = dir.path().join("trace.csv");

    let out = vmem(&[
        "simulate",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--out",
        &trace.display().to_string(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("final x"), "stdout: {stdout}");
    assert!(stdout.contains("switching time"), "stdout: {stdout}");

    let trace = io::read_trace(&trace).unwrap();
    assert_eq!(trace.len(), 150);
}

#[test]
fn simulate_zero_volts_gives_zero_current() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim_path = dir.path().join("zeros.csv");
    io::write_stimulus(&Stimulus::new(1e-4, vec![0.0; 50]).unwrap(), &stim_path).unwrap();
    let out_path = dir.path().join("trace.csv");

    let out = vmem(&[
        "simulate",
        "--params",
        &params,
        "--stimulus",
        &stim_path.display().to_string(),
        "--out",
        &out_path.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);
    let trace = io::read_trace(&out_path).unwrap();
    assert!(trace.i.iter().all(|&i| i == 0.0));
}

#[test]
fn simulate_failure_leaves_no_out_file() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim = write_pulse_stimulus(dir.path());
    let out_path = dir.path().join("never.csv");

    // x0 outside [x_off, x_on] is a data error
    let out = vmem(&[
        "simulate",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--out",
        &out_path.display().to_string(),
        "--x0",
        "2.5",
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out_path.exists(), "failed run must not write --out");
}

#[test]
fn simulate_segment_stimulus_requires_dt() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let seg = dir.path().join("seg.csv");
    std::fs::write(&seg, "duration_s,level_V\n0.005,3.0\n0.01,-1.0\n").unwrap();
    let out_path = dir.path().join("trace.csv");

    let args = [
        "simulate",
        "--params",
        &params,
        "--stimulus",
        &seg.display().to_string(),
        "--out",
        &out_path.display().to_string(),
    ];
    let out = vmem(&args);
    assert_eq!(code(&out), 2);

    let out = vmem(&[&args[..], &["--dt", "1e-4"]].concat());
    assert_eq!(code(&out), 0);
    assert_eq!(io::read_trace(&out_path).unwrap().len(), 150);
}

#[test]
fn validate_reports_pass_and_violations() {
    let dir = tempdir().unwrap();
    let good = write_default_params(dir.path());
    let out = vmem(&["validate", "--params", &good]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));

    let bad_path = dir.path().join("bad.txt");
    io::write_params(
        &ModelParams {
            v_th: 1.2,
            v_h: 1.4,
            ..ModelParams::default()
        },
        &bad_path,
    )
    .unwrap();
    let out = vmem(&["validate", "--params", &bad_path.display().to_string()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("v_th > v_h"));

    let out = vmem(&["validate", "--params", "/nonexistent/params.txt"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn retention_sweep_writes_rows_in_input_order() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let out_path = dir.path().join("sweep.csv");

    let out = vmem(&[
        "retention-sweep",
        "--params",
        &params,
        "--tau-list",
        "0.01,0.02,0.03",
        "--out",
        &out_path.display().to_string(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau_s,retention_s");
    assert_eq!(lines.len(), 4);
    // retention = tau * (ln 10)^(1/5) for the default beta = 5
    let expected = 10f64.ln().powf(0.2);
    for (line, tau) in lines[1..].iter().zip([0.01, 0.02, 0.03]) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], tau);
        assert!((fields[1] / tau / expected - 1.0).abs() < 1e-3);
    }
}

#[test]
fn retention_sweep_rejects_bad_flag_values() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let out_path = dir.path().join("sweep.csv").display().to_string();

    let out = vmem(&[
        "retention-sweep",
        "--params",
        &params,
        "--tau-list",
        "-1",
        "--out",
        &out_path,
    ]);
    assert_eq!(code(&out), 1);

    let out = vmem(&[
        "retention-sweep",
        "--params",
        &params,
        "--tau-list",
        "0.01",
        "--fraction",
        "1.0",
        "--out",
        &out_path,
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fit_recovers_a_single_parameter_end_to_end() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim = write_pulse_stimulus(dir.path());

    // target from a generator with tau = 30 ms
    let gen_path = dir.path().join("gen.txt");
    io::write_params(
        &ModelParams {
            tau: 30e-3,
            ..ModelParams::default()
        },
        &gen_path,
    )
    .unwrap();
    let target = dir.path().join("target.csv");
    let out = vmem(&[
        "simulate",
        "--params",
        &gen_path.display().to_string(),
        "--stimulus",
        &stim,
        "--out",
        &target.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);

    let fitted = dir.path().join("fitted.txt");
    let out = vmem(&[
        "fit",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--target",
        &target.display().to_string(),
        "--out",
        &fitted.display().to_string(),
        "--free",
        "tau",
        "--seed",
        "3",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("relative RMSE"), "stdout: {stdout}");

    let recovered = io::read_params(&fitted).unwrap();
    assert!(
        (recovered.tau / 30e-3 - 1.0).abs() < 0.05,
        "recovered tau = {}",
        recovered.tau
    );
    // only tau moved
    assert_eq!(recovered.k, 150.0);
    assert_eq!(recovered.v_th, 1.8);

    // history sits next to the fitted parameters
    let history = dir.path().join("fitted.txt.history.csv");
    let text = std::fs::read_to_string(&history).unwrap();
    assert!(text.starts_with("iteration,error"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn fit_rejects_misaligned_target() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim = write_pulse_stimulus(dir.path());

    // target simulated on a different grid
    let short_stim = dir.path().join("short.csv");
    io::write_stimulus(
        &Stimulus::from_segments(&[(5e-3, 3.0)], 1e-4).unwrap(),
        &short_stim,
    )
    .unwrap();
    let target = dir.path().join("target.csv");
    let out = vmem(&[
        "simulate",
        "--params",
        &params,
        "--stimulus",
        &short_stim.display().to_string(),
        "--out",
        &target.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);

    let fitted = dir.path().join("fitted.txt");
    let out = vmem(&[
        "fit",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--target",
        &target.display().to_string(),
        "--out",
        &fitted.display().to_string(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!fitted.exists());
}

#[test]
fn fit_rejects_unknown_free_parameter() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim = write_pulse_stimulus(dir.path());
    let out = vmem(&[
        "fit",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--target",
        "whatever.csv",
        "--out",
        "out.txt",
        "--free",
        "x_on",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fit_accepts_a_bounds_file() {
    let dir = tempdir().unwrap();
    let params = write_default_params(dir.path());
    let stim = write_pulse_stimulus(dir.path());

    let gen_path = dir.path().join("gen.txt");
    io::write_params(
        &ModelParams {
            tau: 30e-3,
            ..ModelParams::default()
        },
        &gen_path,
    )
    .unwrap();
    let target = dir.path().join("target.csv");
    vmem(&[
        "simulate",
        "--params",
        &gen_path.display().to_string(),
        "--stimulus",
        &stim,
        "--out",
        &target.display().to_string(),
    ]);

    let bounds = dir.path().join("bounds.txt");
    std::fs::write(&bounds, "tau = 5e-3 5e-2\n").unwrap();
    let fitted = dir.path().join("fitted.txt");
    let out = vmem(&[
        "fit",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--target",
        &target.display().to_string(),
        "--out",
        &fitted.display().to_string(),
        "--free",
        "tau",
        "--bounds",
        &bounds.display().to_string(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recovered = io::read_params(&fitted).unwrap();
    assert!(recovered.tau >= 5e-3 && recovered.tau <= 5e-2);

    // bounds for a parameter that is not free are rejected
    std::fs::write(&bounds, "k = 10 100\n").unwrap();
    let out = vmem(&[
        "fit",
        "--params",
        &params,
        "--stimulus",
        &stim,
        "--target",
        &target.display().to_string(),
        "--out",
        &fitted.display().to_string(),
        "--free",
        "tau",
        "--bounds",
        &bounds.display().to_string(),
    ]);
    assert_eq!(code(&out), 2);
}

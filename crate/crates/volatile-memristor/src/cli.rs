//! Command-line front end. The binary is a thin wrapper around
//! [`run`]; everything it can do is also available as library calls.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data, i/o, or
//! validation errors. Output files are written atomically, so a failing
//! run never leaves a partial `--out` behind. Summary statistics go to
//! stdout; data go only to `--out`.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::fit::{fit, AnnealConfig, DescentConfig, FitParam, FitSpec, FreeParam};
use crate::io;
use crate::params::ModelParams;
use crate::simulator::{
    measure_retention, retention_horizon, simulate, switching_time, SolverConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Parameters the `fit` subcommand frees when `--free` is not given:
/// the thresholds and the growth/decay shape, with the resistance window
/// and state range fixed.
const DEFAULT_FREE: [FitParam; 6] = [
    FitParam::VTh,
    FitParam::VH,
    FitParam::K,
    FitParam::Alpha,
    FitParam::Tau,
    FitParam::Beta,
];

#[derive(Parser)]
#[command(
    name = "vmem",
    version,
    about = "Volatile memristor model: transient simulation, retention analysis, parameter fitting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a voltage stimulus and write the trace CSV
    Simulate(SimulateArgs),
    /// Measure retention time for a list of decay constants
    RetentionSweep(RetentionSweepArgs),
    /// Fit free model parameters to a reference current trace
    Fit(FitArgs),
    /// Validate a parameter file against the model invariants
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Model parameter file
    #[arg(long)]
    params: PathBuf,
    /// Stimulus CSV (time_s,voltage_V or duration_s,level_V)
    #[arg(long)]
    stimulus: PathBuf,
    /// Output trace CSV
    #[arg(long)]
    out: PathBuf,
    /// Sampling interval in seconds (required for segment-form stimuli)
    #[arg(long)]
    dt: Option<f64>,
    /// Initial state value (defaults to x_off)
    #[arg(long)]
    x0: Option<f64>,
}

#[derive(Args)]
struct RetentionSweepArgs {
    /// Model parameter file
    #[arg(long)]
    params: PathBuf,
    /// Comma-separated decay constants in seconds, e.g. 0.01,0.02,0.03
    #[arg(long)]
    tau_list: String,
    /// Output CSV (tau_s,retention_s)
    #[arg(long)]
    out: PathBuf,
    /// State fraction defining the retention crossing
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    /// Solver step in seconds (defaults to min(tau) / 1000)
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// Initial-guess parameter file; fixed parameters keep these values
    #[arg(long)]
    params: PathBuf,
    /// Stimulus CSV shared by the target and the candidate simulations
    #[arg(long)]
    stimulus: PathBuf,
    /// Reference trace CSV whose current column is the fit target
    #[arg(long)]
    target: PathBuf,
    /// Output parameter file; the error history goes to <out>.history.csv
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated free parameters (default: v_th,v_h,k,alpha,tau,beta)
    #[arg(long)]
    free: Option<String>,
    /// Bounds file overriding the default search box (name = lower upper)
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Maximum gradient-descent iterations
    #[arg(long)]
    max_iter: Option<usize>,
    /// Random seed for the annealing phase
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling interval in seconds (required for segment-form stimuli)
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Model parameter file
    #[arg(long)]
    params: PathBuf,
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult = Result<i32, CliError>;

/// Parses `std::env::args` and runs the selected subcommand, returning
/// the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive as clap "errors" but are not
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::RetentionSweep(args) => cmd_retention_sweep(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Validate(args) => cmd_validate(&args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn check_dt_flag(dt: Option<f64>) -> Result<(), CliError> {
    if let Some(dt) = dt {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
        }
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult {
    check_dt_flag(args.dt)?;
    let p = io::read_params(&args.params)?;
    let stim = io::read_stimulus(&args.stimulus, args.dt)?;
    let x0 = args.x0.unwrap_or(p.x_off);
    let cfg = SolverConfig::new(stim.sample_interval);

    let trace = simulate(&p, &stim, x0, &cfg)?;
    io::write_trace(&trace, &args.out)?;

    let i_min = trace.i.iter().cloned().fold(f64::INFINITY, f64::min);
    let i_max = trace.i.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let switching = match switching_time(&trace, p.x_on) {
        Some(t) => format!("{t:.6e} s"),
        None => "not reached".to_string(),
    };
    println!(
        "final x = {:.6e}; current min = {i_min:.6e} A, max = {i_max:.6e} A; switching time = {switching}",
        trace.x.last().copied().unwrap_or(x0),
    );
    Ok(EXIT_OK)
}

fn cmd_retention_sweep(args: &RetentionSweepArgs) -> CliResult {
    let mut taus = Vec::new();
    for part in args.tau_list.split(',') {
        let tau: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad tau value \"{}\"", part.trim())))?;
        if tau <= 0.0 || !tau.is_finite() {
            return Err(CliError::Usage(format!(
                "tau values must be positive, got {tau}"
            )));
        }
        taus.push(tau);
    }
    if taus.is_empty() {
        return Err(CliError::Usage("--tau-list is empty".to_string()));
    }
    if !(args.fraction > 0.0 && args.fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--fraction must lie strictly inside (0, 1), got {}",
            args.fraction
        )));
    }
    check_dt_flag(args.dt)?;

    let p = io::read_params(&args.params)?;
    let dt = args
        .dt
        .unwrap_or_else(|| taus.iter().cloned().fold(f64::INFINITY, f64::min) / 1000.0);
    let cfg = SolverConfig::new(dt);

    let mut out = String::from("tau_s,retention_s\n");
    let mut timeouts = 0usize;
    for &tau in &taus {
        let p_tau = ModelParams { tau, ..p };
        p_tau.ensure_valid()?;
        let horizon = retention_horizon(&p_tau, p_tau.x_on, args.fraction);
        match measure_retention(&p_tau, p_tau.x_on, args.fraction, &cfg, horizon) {
            Ok(retention) => {
                out.push_str(&format!("{tau:.16e},{retention:.16e}\n"));
            }
            Err(Error::RetentionTimeout { .. }) => {
                out.push_str(&format!("{tau:.16e},timeout\n"));
                timeouts += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    io::write_atomic(&args.out, &out)?;
    println!(
        "wrote {} rows ({} timed out); fraction = {}, dt = {dt:.6e} s",
        taus.len(),
        timeouts,
        args.fraction
    );
    Ok(if timeouts > 0 { EXIT_DATA } else { EXIT_OK })
}

fn cmd_fit(args: &FitArgs) -> CliResult {
    check_dt_flag(args.dt)?;
    let free_names: Vec<FitParam> = match &args.free {
        None => DEFAULT_FREE.to_vec(),
        Some(list) => {
            let mut params = Vec::new();
            for name in list.split(',') {
                let name = name.trim();
                let param = FitParam::parse(name).ok_or_else(|| {
                    CliError::Usage(format!("\"{name}\" is not a fittable parameter"))
                })?;
                params.push(param);
            }
            params
        }
    };
    if let Some(n) = args.max_iter {
        if n == 0 {
            return Err(CliError::Usage("--max-iter must be at least 1".to_string()));
        }
    }

    let initial = io::read_params(&args.params)?;
    let stim = io::read_stimulus(&args.stimulus, args.dt)?;
    let target_trace = io::read_trace(&args.target)?;

    // target and stimulus must share both the grid and the length
    let rel_dt_err = (target_trace.dt - stim.sample_interval).abs() / stim.sample_interval;
    if rel_dt_err > 1e-9 {
        return Err(CliError::Data(Error::DtMismatch {
            stimulus: stim.sample_interval,
            solver: target_trace.dt,
        }));
    }
    if target_trace.len() != stim.len() {
        return Err(CliError::Data(Error::LengthMismatch {
            model: stim.len(),
            target: target_trace.len(),
        }));
    }

    let explicit = match &args.bounds {
        Some(path) => io::read_bounds(path)?,
        None => Vec::new(),
    };
    for fp in &explicit {
        if !free_names.contains(&fp.param) {
            return Err(CliError::Data(Error::InvalidFitSpec(format!(
                "bounds given for \"{}\", which is not a free parameter",
                fp.param.name()
            ))));
        }
    }
    let free: Vec<FreeParam> = free_names
        .iter()
        .map(|&param| {
            explicit
                .iter()
                .find(|fp| fp.param == param)
                .copied()
                .unwrap_or_else(|| FreeParam::with_default_bounds(param, &initial))
        })
        .collect();

    let solver = SolverConfig::new(stim.sample_interval);
    let spec = FitSpec::new(initial, free, stim, target_trace.i, solver)?;
    let anneal_cfg = AnnealConfig {
        rng_seed: args.seed,
        ..AnnealConfig::default()
    };
    let descent_cfg = DescentConfig {
        max_iterations: args
            .max_iter
            .unwrap_or(DescentConfig::default().max_iterations),
        ..DescentConfig::default()
    };

    let result = fit(&spec, &anneal_cfg, &descent_cfg)?;

    io::write_params(&result.best_params, &args.out)?;
    let mut history = String::from("iteration,error\n");
    for &(iteration, error) in &result.error_history {
        history.push_str(&format!("{iteration},{error:.16e}\n"));
    }
    io::write_atomic(&history_path(&args.out), &history)?;

    println!(
        "relative RMSE = {:.6e} (annealing evaluations = {}, descent iterations = {}, seed = {})",
        result.best_error, result.iterations.annealing, result.iterations.descent, result.rng_seed
    );
    Ok(EXIT_OK)
}

/// `<out>.history.csv` next to the fitted parameter file.
fn history_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".history.csv");
    PathBuf::from(os)
}

fn cmd_validate(args: &ValidateArgs) -> CliResult {
    match io::read_params(&args.params) {
        Ok(_) => {
            println!("pass");
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("{e}");
            Ok(EXIT_DATA)
        }
    }
}

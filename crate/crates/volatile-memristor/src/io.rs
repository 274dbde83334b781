//! File formats: parameter sets, stimuli, traces, and fit bounds.
//!
//! All values are written in SI base units as decimal text with 17
//! significant digits, which round-trips `f64` exactly while staying
//! diffable. Parsers reject malformed input instead of coercing it; every
//! parse error names the offending line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fit::{FitParam, FreeParam};
use crate::params::{validate_params, ModelParams};
use crate::simulator::Trace;
use crate::stimulus::Stimulus;

/// Canonical key order of a parameter file.
const PARAM_KEYS: [&str; 10] = [
    "x_on", "x_off", "v_th", "v_h", "r_on", "r_off", "k", "alpha", "tau", "beta",
];

const TRACE_HEADER: &str = "time_s,voltage_V,current_A,state_x,resistance_ohm";
const STIMULUS_UNIFORM_HEADER: &str = "time_s,voltage_V";
const STIMULUS_SEGMENT_HEADER: &str = "duration_s,level_V";

/// Relative tolerance when checking a file's time column for uniform
/// spacing; covers the rounding of `t0 + k * dt` to text and back.
const TIME_GRID_TOL: f64 = 1e-6;

fn fmt17(value: f64) -> String {
    format!("{value:.16e}")
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::File {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Writes `contents` to `path` atomically: the data goes to a temporary
/// sibling first and is renamed into place, so a failed run never leaves
/// a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    let ctx = |e: std::io::Error| Error::File {
        path: path.display().to_string(),
        msg: e.to_string(),
    };
    fs::write(&tmp, contents).map_err(ctx)?;
    fs::rename(&tmp, path).map_err(ctx)?;
    Ok(())
}

/// Serializes a parameter set as `name = value` lines.
pub fn params_to_string(p: &ModelParams) -> String {
    let values = [
        p.x_on, p.x_off, p.v_th, p.v_h, p.r_on, p.r_off, p.k, p.alpha, p.tau, p.beta,
    ];
    let mut out = String::from("# volatile memristor model parameters (SI base units)\n");
    for (key, value) in PARAM_KEYS.iter().zip(values) {
        let _ = writeln!(out, "{key} = {}", fmt17(value));
    }
    out
}

/// Writes a parameter file; see [`params_to_string`] for the format.
pub fn write_params(p: &ModelParams, path: &Path) -> Result<()> {
    write_atomic(path, &params_to_string(p))
}

/// Splits a data line into `(key, value)` around `=`, ignoring blank
/// lines and `#` comments. Returns `None` for lines with no content.
fn key_value(line: &str) -> Option<(&str, &str)> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return None;
    }
    Some(match body.split_once('=') {
        Some((k, v)) => (k.trim(), v.trim()),
        None => (body, ""),
    })
}

/// Reads a parameter file and validates the result. All ten keys must be
/// present exactly once; violations of the parameter invariants are
/// reported with the line of the offending field.
pub fn read_params(path: &Path) -> Result<ModelParams> {
    let text = read_file(path)?;
    let path_str = path.display().to_string();
    let mut seen: Vec<(usize, &str, f64)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let Some((key, value)) = key_value(line) else {
            continue;
        };
        let Some(&canonical) = PARAM_KEYS.iter().find(|&&k| k == key) else {
            return Err(Error::Format {
                path: path_str,
                line: lineno,
                msg: format!("unknown parameter \"{key}\""),
            });
        };
        if seen.iter().any(|&(_, k, _)| k == canonical) {
            return Err(Error::Format {
                path: path_str,
                line: lineno,
                msg: format!("duplicate parameter \"{key}\""),
            });
        }
        let parsed: f64 = value.parse().map_err(|_| Error::Format {
            path: path_str.clone(),
            line: lineno,
            msg: format!("cannot parse value for \"{key}\": \"{value}\""),
        })?;
        seen.push((lineno, canonical, parsed));
    }

    for key in PARAM_KEYS {
        if !seen.iter().any(|&(_, k, _)| k == key) {
            return Err(Error::File {
                path: path_str,
                msg: format!("missing parameter \"{key}\""),
            });
        }
    }

    let get = |key: &str| seen.iter().find(|&&(_, k, _)| k == key).unwrap().2;
    let p = ModelParams {
        x_on: get("x_on"),
        x_off: get("x_off"),
        v_th: get("v_th"),
        v_h: get("v_h"),
        r_on: get("r_on"),
        r_off: get("r_off"),
        k: get("k"),
        alpha: get("alpha"),
        tau: get("tau"),
        beta: get("beta"),
    };
    let report = validate_params(&p);
    if !report.is_valid() {
        let mut msg = String::from("invalid parameters: ");
        for (i, v) in report.violations.iter().enumerate() {
            if i > 0 {
                msg.push_str("; ");
            }
            let line = seen
                .iter()
                .find(|&&(_, k, _)| k == v.field)
                .map(|&(l, _, _)| l)
                .unwrap_or(0);
            let _ = write!(msg, "{} ({} at line {})", v.requirement, v.field, line);
        }
        return Err(Error::File {
            path: path_str,
            msg,
        });
    }
    Ok(p)
}

/// Serializes a trace as CSV with header
/// `time_s,voltage_V,current_A,state_x,resistance_ohm`.
pub fn trace_to_string(trace: &Trace) -> String {
    let mut out = String::with_capacity(96 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for k in 0..trace.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt17(trace.time(k)),
            fmt17(trace.v[k]),
            fmt17(trace.i[k]),
            fmt17(trace.x[k]),
            fmt17(trace.r[k]),
        );
    }
    out
}

/// Writes a trace CSV; see [`trace_to_string`] for the format.
pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    write_atomic(path, &trace_to_string(trace))
}

fn split_row<'a>(
    line: &'a str,
    expected: usize,
    path: &str,
    lineno: usize,
) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != expected {
        return Err(Error::Format {
            path: path.to_string(),
            line: lineno,
            msg: format!("expected {expected} columns, found {}", fields.len()),
        });
    }
    Ok(fields)
}

fn parse_field(text: &str, column: &str, path: &str, lineno: usize) -> Result<f64> {
    let value: f64 = text.parse().map_err(|_| Error::Format {
        path: path.to_string(),
        line: lineno,
        msg: format!("cannot parse {column}: \"{text}\""),
    })?;
    if !value.is_finite() {
        return Err(Error::Format {
            path: path.to_string(),
            line: lineno,
            msg: format!("{column} must be finite, got {value}"),
        });
    }
    Ok(value)
}

/// Checks a time column for a strictly increasing uniform grid and
/// returns `(t0, dt)`.
fn uniform_grid(times: &[f64], path: &str, first_data_line: usize) -> Result<(f64, f64)> {
    let t0 = times[0];
    let dt = times[1] - t0;
    if dt <= 0.0 {
        return Err(Error::Format {
            path: path.to_string(),
            line: first_data_line + 1,
            msg: "time_s must be strictly increasing".to_string(),
        });
    }
    for (k, &t) in times.iter().enumerate().skip(1) {
        let expected = t0 + k as f64 * dt;
        if (t - expected).abs() > TIME_GRID_TOL * dt {
            return Err(Error::Format {
                path: path.to_string(),
                line: first_data_line + k,
                msg: format!("nonuniform time base: expected {expected}, found {t}"),
            });
        }
    }
    Ok((t0, dt))
}

/// Reads a trace CSV written by [`write_trace`] (or any file with the
/// same header, five columns per row, and a uniform time grid).
pub fn read_trace(path: &Path) -> Result<Trace> {
    let text = read_file(path)?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate();

    let Some((_, header)) = lines.next() else {
        return Err(Error::File {
            path: path_str,
            msg: "empty file".to_string(),
        });
    };
    if header.trim_end() != TRACE_HEADER {
        return Err(Error::File {
            path: path_str,
            msg: format!(
                "unknown header \"{}\", expected \"{TRACE_HEADER}\"",
                header.trim_end()
            ),
        });
    }

    let mut times = Vec::new();
    let mut trace = Trace {
        t0: 0.0,
        dt: 0.0,
        v: Vec::new(),
        i: Vec::new(),
        x: Vec::new(),
        r: Vec::new(),
    };
    let mut first_data_line = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if first_data_line == 0 {
            first_data_line = lineno;
        }
        let fields = split_row(line, 5, &path_str, lineno)?;
        times.push(parse_field(fields[0], "time_s", &path_str, lineno)?);
        trace
            .v
            .push(parse_field(fields[1], "voltage_V", &path_str, lineno)?);
        trace
            .i
            .push(parse_field(fields[2], "current_A", &path_str, lineno)?);
        trace
            .x
            .push(parse_field(fields[3], "state_x", &path_str, lineno)?);
        trace
            .r
            .push(parse_field(fields[4], "resistance_ohm", &path_str, lineno)?);
    }
    if times.len() < 2 {
        return Err(Error::File {
            path: path_str,
            msg: format!("need at least 2 data rows, found {}", times.len()),
        });
    }
    let (t0, dt) = uniform_grid(&times, &path_str, first_data_line)?;
    trace.t0 = t0;
    trace.dt = dt;
    Ok(trace)
}

/// Serializes a stimulus in the uniform `time_s,voltage_V` form.
pub fn stimulus_to_string(stim: &Stimulus) -> String {
    let mut out = String::with_capacity(48 * (stim.len() + 1));
    out.push_str(STIMULUS_UNIFORM_HEADER);
    out.push('\n');
    for (k, &v) in stim.samples.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{}",
            fmt17(k as f64 * stim.sample_interval),
            fmt17(v)
        );
    }
    out
}

/// Writes a stimulus CSV in the uniform form.
pub fn write_stimulus(stim: &Stimulus, path: &Path) -> Result<()> {
    write_atomic(path, &stimulus_to_string(stim))
}

/// Reads a stimulus file. The header selects the form:
///
/// * `time_s,voltage_V` — uniformly sampled levels; the interval comes
///   from the time column, and a provided `dt` must agree with it.
/// * `duration_s,level_V` — segments, expanded at spacing `dt`, which is
///   required for this form.
pub fn read_stimulus(path: &Path, dt: Option<f64>) -> Result<Stimulus> {
    let text = read_file(path)?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate();

    let Some((_, header)) = lines.next() else {
        return Err(Error::File {
            path: path_str,
            msg: "empty file".to_string(),
        });
    };
    let header = header.trim_end();
    let segment_form = match header {
        STIMULUS_UNIFORM_HEADER => false,
        STIMULUS_SEGMENT_HEADER => true,
        other => {
            return Err(Error::File {
                path: path_str,
                msg: format!(
                    "unknown header \"{other}\", expected \"{STIMULUS_UNIFORM_HEADER}\" or \"{STIMULUS_SEGMENT_HEADER}\""
                ),
            })
        }
    };

    let mut col0 = Vec::new();
    let mut col1 = Vec::new();
    let mut first_data_line = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if first_data_line == 0 {
            first_data_line = lineno;
        }
        let fields = split_row(line, 2, &path_str, lineno)?;
        let (name0, name1) = if segment_form {
            ("duration_s", "level_V")
        } else {
            ("time_s", "voltage_V")
        };
        col0.push(parse_field(fields[0], name0, &path_str, lineno)?);
        col1.push(parse_field(fields[1], name1, &path_str, lineno)?);
    }

    if segment_form {
        let Some(dt) = dt else {
            return Err(Error::File {
                path: path_str,
                msg: "segment-form stimulus requires a sampling interval (dt)".to_string(),
            });
        };
        let segments: Vec<(f64, f64)> = col0.into_iter().zip(col1).collect();
        Stimulus::from_segments(&segments, dt)
    } else {
        if col0.len() < 2 {
            return Err(Error::File {
                path: path_str,
                msg: format!("need at least 2 data rows, found {}", col0.len()),
            });
        }
        let (_, file_dt) = uniform_grid(&col0, &path_str, first_data_line)?;
        if let Some(dt) = dt {
            if (dt - file_dt).abs() > TIME_GRID_TOL * file_dt {
                return Err(Error::File {
                    path: path_str,
                    msg: format!(
                        "requested dt {dt} disagrees with the file's sampling interval {file_dt}"
                    ),
                });
            }
        }
        Stimulus::new(file_dt, col1)
    }
}

/// Reads fit bounds: lines of `name = lower upper` (whitespace-separated
/// bounds), `#` comments allowed. Names must be fittable parameters.
pub fn read_bounds(path: &Path) -> Result<Vec<FreeParam>> {
    let text = read_file(path)?;
    let path_str = path.display().to_string();
    let mut out: Vec<FreeParam> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let Some((key, value)) = key_value(line) else {
            continue;
        };
        let Some(param) = FitParam::parse(key) else {
            return Err(Error::Format {
                path: path_str,
                line: lineno,
                msg: format!("\"{key}\" is not a fittable parameter"),
            });
        };
        if out.iter().any(|fp| fp.param == param) {
            return Err(Error::Format {
                path: path_str,
                line: lineno,
                msg: format!("duplicate bounds for \"{key}\""),
            });
        }
        let parts: Vec<&str> = value.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Format {
                path: path_str,
                line: lineno,
                msg: format!("expected \"{key} = <lower> <upper>\""),
            });
        }
        let lower = parse_field(parts[0], "lower bound", &path_str, lineno)?;
        let upper = parse_field(parts[1], "upper bound", &path_str, lineno)?;
        out.push(FreeParam::new(param, lower, upper));
    }
    Ok(out)
}

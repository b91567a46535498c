//! Command-line front end. Exit codes: 0 success, 1 invalid input, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use memsmag::dynamics::find_resonance;
use memsmag::explorer::emit::{frequency_response_csv, psd_csv};
use memsmag::explorer::report::{run_transient, scenario_resonator, TransientOptions};
use memsmag::explorer::scenario::Sensor;
use memsmag::explorer::verify::verify_beam;
use memsmag::explorer::{
    load_default_scenario, load_scenario, optimize, run_scenario, sweep, Constraints, Emit,
    Format, FreeParameter, Objective, ReportDocument, Scale, Scenario,
};
use memsmag::Error;

#[derive(Parser)]
#[command(name = "memsmag", version, about = "Out-of-plane MEMS magnetometer simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Scenario file (TOML, SI units). Defaults to $MEMSMAG_CONFIG_DIR/default.toml
    /// or the shipped default.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; `.csv` selects CSV, anything else TOML. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Simulate(#[command(flatten)] Io),
    /// Vary one numeric field.
    Sweep {
        #[command(flatten)]
        io: Io,
        /// Dotted path, e.g. environment.field_magnitude
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
        scale: ScaleArg,
    },
    /// Constrained design search.
    Optimize {
        #[command(flatten)]
        io: Io,
        /// PATH=LOWER:UPPER, repeatable (1 to 6).
        #[arg(long = "free", required = true)]
        free: Vec<String>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MinDetectableField)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 0.5)]
        max_stress_fraction: f64,
        #[arg(long, default_value_t = 1.0)]
        max_temperature_rise: f64,
    },
    /// Noise budget; with a `.csv` output, the per-source PSDs across the band.
    Noise {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Resonator frequency response as CSV.
    FreqResponse {
        #[command(flatten)]
        io: Io,
        /// Hz; defaults to f0/10.
        #[arg(long)]
        f_min: Option<f64>,
        /// Hz; defaults to 10·f0.
        #[arg(long)]
        f_max: Option<f64>,
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Time-domain response to the drive as CSV (t, x, v, V_out).
    Transient {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Drive with a square wave at f0.
        #[arg(long)]
        at_resonance: bool,
    },
    /// Cross-check the closed-form beam mechanics against the finite-difference solver.
    Verify(#[command(flatten)] Io),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinDetectableField,
    Sensitivity,
}

enum Failure {
    Input(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Input(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn scenario(io: &Io) -> Result<Scenario, Failure> {
    match &io.config {
        Some(p) => load_scenario(p),
        None => load_default_scenario(),
    }
    .map_err(|e| match e {
        // an unreadable config is the caller's mistake
        Error::Io { .. } => Failure::Input(e.to_string()),
        e => e.into(),
    })
}

fn write(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| {
            Failure::Runtime(Error::Io { path: p.to_path_buf(), source }.to_string())
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit<T: Emit>(item: &T, io: &Io, default: Format) -> Result<(), Failure> {
    let format = io.out.as_deref().map_or(default, Format::from_path);
    write(io.out.as_deref(), &item.render(format)?)
}

fn parse_free(s: &str) -> Result<FreeParameter, Failure> {
    let bad = || Failure::Input(format!("--free expects PATH=LOWER:UPPER, got '{s}'"));
    let (path, range) = s.split_once('=').ok_or_else(bad)?;
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    Ok(FreeParameter::new(
        path,
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(io) => {
            let s = scenario(&io)?;
            let report = run_scenario(&s)?;
            emit(&ReportDocument { scenario: s, report }, &io, Format::Toml)
        }
        Command::Sweep {
            io,
            param,
            from,
            to,
            steps,
            scale,
        } => {
            let s = scenario(&io)?;
            let scale = match scale {
                ScaleArg::Linear => Scale::Linear,
                ScaleArg::Log => Scale::Log,
            };
            emit(&sweep(&s, &param, from, to, steps, scale)?, &io, Format::Csv)
        }
        Command::Optimize {
            io,
            free,
            objective,
            max_stress_fraction,
            max_temperature_rise,
        } => {
            let s = scenario(&io)?;
            let free = free.iter().map(|f| parse_free(f)).collect::<Result<Vec<_>, _>>()?;
            let objective = match objective {
                ObjectiveArg::MinDetectableField => Objective::MinDetectableField,
                ObjectiveArg::Sensitivity => Objective::Sensitivity,
            };
            let constraints = Constraints {
                max_stress_fraction,
                max_temperature_rise,
            };
            emit(&optimize(&s, &free, objective, &constraints)?, &io, Format::Toml)
        }
        Command::Noise { io, points } => {
            let s = scenario(&io)?;
            let noise = run_scenario(&s)?.noise;
            match io.out.as_deref().map(Format::from_path) {
                Some(Format::Csv) => write(io.out.as_deref(), &psd_csv(&noise, points)?),
                _ => write(
                    io.out.as_deref(),
                    &toml::to_string(&noise).map_err(|e| Failure::Runtime(e.to_string()))?,
                ),
            }
        }
        Command::FreqResponse {
            io,
            f_min,
            f_max,
            points,
        } => {
            let s = scenario(&io)?;
            let res = scenario_resonator(&s)?;
            let f0 = res.natural_frequency;
            let (lo, hi) = (f_min.unwrap_or(f0 / 10.0), f_max.unwrap_or(10.0 * f0));
            match find_resonance(&res, lo, hi, points.max(16)) {
                Ok(f) => log::info!("resonance at {f:e} Hz (f0 = {f0:e} Hz)"),
                Err(e) => log::info!("{e}"),
            }
            write(io.out.as_deref(), &frequency_response_csv(&res, lo, hi, points)?)
        }
        Command::Transient {
            io,
            duration,
            dt,
            at_resonance,
        } => {
            let s = scenario(&io)?;
            let series = run_transient(
                &s,
                &TransientOptions {
                    dt,
                    duration,
                    at_resonance,
                },
            )?;
            let mut buf = Vec::new();
            series.write_csv(&mut buf)?;
            write(io.out.as_deref(), &String::from_utf8_lossy(&buf))
        }
        Command::Verify(io) => {
            let s = scenario(&io)?;
            let beam = match s.resolve()?.sensor {
                Sensor::Lorentz(d) => d.support_beam,
                Sensor::Ferro(d) => d.suspension,
            };
            let report = verify_beam(&beam)?;
            let mut text = String::new();
            for c in &report.checks {
                text += &format!(
                    "{} {:<18} value {:e} reference {:e} tolerance {:e}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.reference,
                    c.tolerance
                );
            }
            match io.out.as_deref() {
                Some(p) => write(
                    Some(p),
                    &toml::to_string(&report).map_err(|e| Failure::Runtime(e.to_string()))?,
                )?,
                None => print!("{text}"),
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Runtime("beam oracle cross-check failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

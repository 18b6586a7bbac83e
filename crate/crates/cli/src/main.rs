//! `liquilens` command-line tool.
//!
//! Exit codes: 0 success (possibly with warnings), 1 usage or configuration
//! error, 2 domain or data error.

mod commands;
mod config;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use commands::{DataSource, PumpUnits, TraceOptions};
use config::{OutputFormat, PartialConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Lens(#[from] liquilens::LensError),
    #[error(transparent)]
    Data(#[from] liquilens::calibration::CalibrationError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Lens(_) | CliError::Data(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "liquilens", version, about = "Liquid-filled variable-focus lens calculator")]
struct Cli {
    /// Lens diameter in mm [default: 2.0]
    #[arg(long, global = true)]
    diameter: Option<f64>,
    /// Refractive index of the filling liquid [default: 1.33]
    #[arg(long, global = true)]
    index: Option<f64>,
    /// Image-space F-number used by `trace` [default: 2.8]
    #[arg(long = "f-number", global = true)]
    f_number: Option<f64>,
    /// Output format [default: table]
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write an SVG plot to this path
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct PumpArgs {
    /// Interpret --volume in pump units: cap mm³ = scale * (volume - dead volume)
    #[arg(long)]
    pump_units: bool,
    #[arg(long, requires = "pump_units", default_value_t = 0.001)]
    scale: f64,
    #[arg(long = "dead-volume", requires = "pump_units", default_value_t = 0.0)]
    dead_volume: f64,
}

impl PumpArgs {
    fn units(&self) -> Result<Option<PumpUnits>, CliError> {
        if !self.pump_units {
            return Ok(None);
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(CliError::Usage(format!("--scale must be positive, got {}", self.scale)));
        }
        Ok(Some(PumpUnits {
            scale: self.scale,
            dead_volume: self.dead_volume,
        }))
    }
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file with header `volume,contact_angle_deg`
    path: Option<PathBuf>,
    /// Use the embedded six-point sample dataset
    #[arg(long, conflicts_with = "path")]
    sample: bool,
}

impl DataArgs {
    fn source(&self) -> Result<DataSource, CliError> {
        match (&self.path, self.sample) {
            (_, true) => Ok(DataSource::Sample),
            (Some(p), false) => Ok(DataSource::File(p.clone())),
            (None, false) => Err(CliError::Usage("provide a data file or --sample".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cap geometry and focal length for a cap volume (mm³)
    Forward {
        #[arg(long)]
        volume: f64,
        #[command(flatten)]
        pump: PumpArgs,
    },
    /// Cap volume and geometry needed for a focal length (mm)
    Inverse {
        #[arg(long)]
        focal: f64,
        #[command(flatten)]
        pump: PumpArgs,
    },
    /// Theoretical volume / contact angle curve over a focal-length range
    Curve {
        #[arg(long = "f-min")]
        f_min: f64,
        #[arg(long = "f-max")]
        f_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Meridional ray trace: EFL, focus positions and circle of least confusion
    Trace {
        #[arg(long)]
        volume: f64,
        #[command(flatten)]
        pump: PumpArgs,
        /// Rays in the fan
        #[arg(long, default_value_t = liquilens::ray_trace::DEFAULT_RAY_COUNT)]
        rays: usize,
        /// Limit the pupil to the lens rim
        #[arg(long)]
        clamp_to_rim: bool,
    },
    /// Linear law and volume calibration for measured data
    Fit {
        #[command(flatten)]
        data: DataArgs,
        /// Write the embedded sample CSV to this path and exit
        #[arg(long = "export-sample", requires = "sample")]
        export_sample: Option<PathBuf>,
    },
    /// Theory-vs-measurement table for measured data
    Compare {
        #[command(flatten)]
        data: DataArgs,
        /// Skip the fitted calibration column
        #[arg(long)]
        no_fit: bool,
    },
}

fn run(cli: Cli) -> Result<commands::Report, CliError> {
    let flags = PartialConfig {
        diameter: cli.diameter,
        index: cli.index,
        f_number: cli.f_number,
        format: cli.format,
        plot: cli.plot,
    };
    let cfg = flags.over(PartialConfig::from_env()?).resolve();

    match cli.command {
        Command::Forward { volume, pump } => commands::forward(&cfg, volume, pump.units()?),
        Command::Inverse { focal, pump } => commands::inverse(&cfg, focal, pump.units()?),
        Command::Curve { f_min, f_max, steps } => commands::curve(&cfg, f_min, f_max, steps),
        Command::Trace {
            volume,
            pump,
            rays,
            clamp_to_rim,
        } => commands::trace(&cfg, volume, pump.units()?, TraceOptions { rays, clamp_to_rim }),
        Command::Fit { data, export_sample } => {
            if let Some(path) = export_sample {
                commands::export_sample(&path)?;
                return Ok(commands::Report::default());
            }
            commands::fit(&cfg, &data.source()?)
        }
        Command::Compare { data, no_fit } => commands::compare(&cfg, &data.source()?, !no_fit),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.stdout.as_bytes());
            let mut stderr = std::io::stderr().lock();
            for w in &report.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            for n in &report.notes {
                let _ = writeln!(stderr, "{n}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

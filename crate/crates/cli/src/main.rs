use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fiberpair::commands::{self, FitModel};
use fiberpair::config::RunConfig;
use fiberpair::report::{SweepScale, SweepSpec, SweepVariable};
use fiberpair::table::{read_counts, read_series, SeriesColumns};
use fiberpair::{CliError, Result};
use fiberpair_core::{InversionMode, Observation};

/// Photon-pair and Raman-noise modelling for fiber heralded single-photon sources.
#[derive(Parser)]
#[command(name = "fiberpair", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Clamp negative inverted noise rates to zero instead of failing.
    #[arg(long, global = true)]
    lenient: bool,
    /// Also report rates per second (per-pulse value times repetition rate).
    #[arg(long, global = true)]
    per_second: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the generation and detection model once.
    Model,
    /// Evaluate the model over a parameter grid.
    Sweep {
        #[arg(long)]
        variable: SweepVariable,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Invert measured or simulated counts into generation rates.
    Estimate {
        /// CSV with pulse_count,n_s,n_i,n_co,n_ac (optional leading label).
        counts: PathBuf,
    },
    /// Least-squares fit of a two-column series.
    Fit {
        series: PathBuf,
        #[arg(long, value_enum)]
        model: FitModel,
        #[arg(long, default_value = "x")]
        x_col: String,
        #[arg(long, default_value = "y")]
        y_col: String,
        #[arg(long)]
        weight_col: Option<String>,
    },
    /// Monte Carlo pulse-by-pulse counting, optionally over a peak-power grid.
    Simulate {
        #[arg(long, requires_all = ["stop", "steps"])]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        scale: SweepScale,
    },
    /// Raman gain from an observed efficiency or κ-vs-√R slope.
    Calibrate {
        #[arg(long, requires = "pair_rate", conflicts_with = "slope")]
        efficiency: Option<f64>,
        #[arg(long)]
        pair_rate: Option<f64>,
        #[arg(long, required_unless_present = "efficiency")]
        slope: Option<f64>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    start: f64,
    #[arg(long)]
    stop: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value_t)]
    scale: SweepScale,
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::validation("--config is required"))?;
    RunConfig::load(path)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Model => commands::model(&config(&cli)?, cli.per_second)?.emit(out)?,
        Command::Sweep { variable, grid } => {
            let spec = SweepSpec {
                variable: *variable,
                start: grid.start,
                stop: grid.stop,
                steps: grid.steps,
                scale: grid.scale,
            };
            commands::sweep(&config(&cli)?, &spec, cli.per_second)?.emit(out)?
        }
        Command::Estimate { counts } => {
            let cfg = config(&cli)?;
            let rows = read_counts(counts)?;
            let mode = if cli.lenient { InversionMode::Lenient } else { InversionMode::Strict };
            let est = commands::estimate(&cfg, &rows, mode, cli.per_second)?;
            est.table.emit(out)?;
            for (row, e) in &est.failures {
                eprintln!("row {row}: {e}");
            }
            if let Some(code) = est.failures.iter().map(|(_, e)| e.exit_code()).max() {
                return Ok(ExitCode::from(code as u8));
            }
        }
        Command::Fit { series, model, x_col, y_col, weight_col } => {
            let cols = SeriesColumns { x: x_col.clone(), y: y_col.clone(), weight: weight_col.clone() };
            commands::fit(&read_series(series, &cols)?, *model)?.emit(out)?
        }
        Command::Simulate { start, stop, steps, scale } => {
            let cfg = config(&cli)?;
            let mut sim = cfg.require_sim()?;
            if let Some(seed) = cli.seed {
                sim.seed = seed;
            }
            let spec = match (start, stop, steps) {
                (Some(start), Some(stop), Some(steps)) => Some(SweepSpec {
                    variable: SweepVariable::PeakPower,
                    start: *start,
                    stop: *stop,
                    steps: *steps,
                    scale: *scale,
                }),
                _ => None,
            };
            let (table, results) = commands::simulate(&cfg, &sim, spec.as_ref())?;
            table.emit(out)?;
            eprint!("{}", commands::simulation_summary(&results));
        }
        Command::Calibrate { efficiency, pair_rate, slope } => {
            let observed = match (efficiency, pair_rate, slope) {
                (Some(e), Some(r), None) => Observation::Efficiency { efficiency: *e, pair_rate: *r },
                (None, None, Some(a)) => Observation::Slope(*a),
                _ => return Err(CliError::validation("give either --efficiency with --pair-rate, or --slope")),
            };
            commands::calibrate(&config(&cli)?, observed)?.emit(out)?
        }
    }
    Ok(ExitCode::SUCCESS)
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
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `nvsim`: run censored-newsvendor regret experiments from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nvsim::bounds::{BoundInputs, BoundReport};
use nvsim::config::{parse_config, parse_preset, preset_names};
use nvsim::policies::PolicyKind;
use nvsim::report::{emit_bound_report, emit_regret_csv, format_km_csv, parse_km_csv};
use nvsim::sim::{run_experiment, DemandSpec, ExperimentConfig};
use nvsim::Error;

#[derive(Parser)]
#[command(name = "nvsim", version, about = "Censored newsvendor regret experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured policies and write mean cumulative regret.
    Run(RunArgs),
    /// Like `run`, but requires at least two policies in one CSV.
    Compare(CompareArgs),
    /// Evaluate the regret-bound constants for a configuration.
    Bounds(BoundsArgs),
    /// Fit a Kaplan–Meier survival curve to censored sales.
    Km(KmArgs),
    /// List the bundled preset names.
    Presets,
}

#[derive(Args)]
struct Source {
    /// Config file of key=value lines.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Override a config key, e.g. `--set horizon=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Source {
    fn load(&self) -> nvsim::Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => parse_config(path, &self.overrides),
            (None, Some(name)) => parse_preset(name, &self.overrides),
            (None, None) => Err(Error::Config {
                key: "config".into(),
                message: "either --config or --preset is required".into(),
            }),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Pseudo-regret CSV output.
    #[arg(long)]
    out: PathBuf,
    /// Optional realised-regret CSV output.
    #[arg(long)]
    realized_out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated policies, replacing the configured list.
    #[arg(long)]
    policies: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KmArgs {
    /// CSV with header `sale,censored`.
    #[arg(long = "in")]
    input: PathBuf,
    /// CSV with header `x,survival`.
    #[arg(long)]
    out: PathBuf,
}

/// Failure split by exit code.
enum Failure {
    Config(Error),
    Runtime(Error),
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e)
}

fn runtime_err(e: Error) -> Failure {
    Failure::Runtime(e)
}

fn write_curves(config: &ExperimentConfig, out: &Path, realized_out: Option<&Path>) -> Result<(), Failure> {
    let outcome = run_experiment(config).map_err(runtime_err)?;
    emit_regret_csv(&outcome.pseudo, out).map_err(runtime_err)?;
    if let Some(path) = realized_out {
        emit_regret_csv(&outcome.realized, path).map_err(runtime_err)?;
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let config = args.source.load().map_err(config_err)?;
    write_curves(&config, &args.out, args.realized_out.as_deref())
}

fn compare(args: &CompareArgs) -> Result<(), Failure> {
    let mut config = args.run.source.load().map_err(config_err)?;
    if let Some(list) = &args.policies {
        config.policies = list
            .split(',')
            .map(|s| s.trim().parse::<PolicyKind>())
            .collect::<nvsim::Result<_>>()
            .map_err(config_err)?;
        config.validate().map_err(config_err)?;
    }
    if config.policies.len() < 2 {
        return Err(Failure::Config(Error::Config {
            key: "policies".into(),
            message: "compare needs at least two policies".into(),
        }));
    }
    write_curves(&config, &args.run.out, args.run.realized_out.as_deref())
}

fn bounds(args: &BoundsArgs) -> Result<(), Failure> {
    let config = args.source.load().map_err(config_err)?;
    let DemandSpec::Weibull { theta, k } = config.demand else {
        return Err(Failure::Config(Error::Config {
            key: "demand.family".into(),
            message: "bounds are defined for Weibull demand only".into(),
        }));
    };
    let inputs = BoundInputs {
        cost: config.cost,
        k,
        theta_star: theta,
        prior: config.prior,
        horizon: config.horizon,
        delta: config.delta,
    };
    let report = BoundReport::compute(&inputs, &config.checkpoints).map_err(runtime_err)?;
    emit_bound_report(&report, &args.out).map_err(runtime_err)
}

fn km(args: &KmArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| runtime_err(e.into()))?;
    let estimate = parse_km_csv(&text).map_err(runtime_err)?;
    std::fs::write(&args.out, format_km_csv(&estimate)).map_err(|e| runtime_err(e.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Compare(a) => compare(a),
        Command::Bounds(a) => bounds(a),
        Command::Km(a) => km(a),
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

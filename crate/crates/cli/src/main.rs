//! `amalgam`: configuration-driven front end.
//!
//! Exit status is 0 on success, 2 when a check is flagged (a violation, a
//! failed hypothesis or a divergent average) and 1 on configuration errors.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::run::{Options, Request};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("flagged: {0}")]
    Flagged(String),
    #[error(transparent)]
    Core(#[from] amalgam::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Flagged(_) => 2,
            CliError::Core(amalgam::Error::Hypothesis(_) | amalgam::Error::Divergence(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "amalgam", version, about = "Weighted amalgam spaces, Orlicz norms and θ-type Calderón–Zygmund operators")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the JSON report and CSV rows; without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run this many grid refinements and report the drift.
    #[arg(long, global = true)]
    refine: Option<u32>,
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weight diagnostics.
    Weights {
        #[command(subcommand)]
        action: WeightsAction,
    },
    /// Amalgam norm of a function.
    Norm,
    /// Truncated singular integrals and commutators.
    Operator {
        #[command(subcommand)]
        action: OperatorAction,
    },
    /// Run a theorem experiment (2.1-2.4, 5.1-5.4).
    Verify { experiment: String },
    /// Generalized Hölder inequality over the family.
    Holder,
    /// Two-weight bump conditions over the family.
    Bump,
    /// Mean growth and weighted oscillation of a BMO function.
    Bmo,
}

#[derive(Debug, Subcommand)]
enum WeightsAction {
    Profile,
}

#[derive(Debug, Subcommand)]
enum OperatorAction {
    Apply,
}

impl Command {
    fn request(&self) -> Request {
        match self {
            Command::Weights { action: WeightsAction::Profile } => Request::WeightsProfile,
            Command::Norm => Request::Norm,
            Command::Operator { action: OperatorAction::Apply } => Request::OperatorApply,
            Command::Verify { experiment } => Request::Verify(experiment.clone()),
            Command::Holder => Request::Holder,
            Command::Bump => Request::Bump,
            Command::Bmo => Request::Bmo,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("amalgam: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = RunConfig::parse(&text, &path.display().to_string())?;
    let options = Options {
        refine: cli.refine,
        seed: cli.seed,
    };
    let outcome = run::run(&config, &cli.command.request(), &options)?;

    let json = serde_json::to_string_pretty(&outcome.report)? + "\n";
    let task = config.task.name();
    let dir = match (&cli.out, &config.output.json, &config.output.csv) {
        (Some(d), _, _) => Some(d.clone()),
        (None, None, None) => None,
        _ => Some(PathBuf::from(".")),
    };
    match dir {
        None => print!("{json}"),
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            let json_name = config.output.json.clone().unwrap_or_else(|| format!("{task}.json"));
            std::fs::write(dir.join(json_name), json)?;
            if let Some(csv) = &outcome.csv {
                let csv_name = config.output.csv.clone().unwrap_or_else(|| format!("{task}.csv"));
                std::fs::write(dir.join(csv_name), csv)?;
            }
        }
    }
    match outcome.flagged {
        Some(reason) => Err(CliError::Flagged(reason)),
        None => Ok(()),
    }
}

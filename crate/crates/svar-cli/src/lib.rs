//! Command-line front end: parse one declarative configuration document, run
//! the requested computation, and emit machine-readable artifacts.
//!
//! Exit status: 0 on success, 1 on usage/configuration errors, 2 when
//! `validate` finds a failing check.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{EngineChoice, ExpansionChoice, OutputFormat, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] svar_core::Error),
    #[error("io error: {0}")]
    Io(String),
    #[error("serialisation error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "svar",
    version,
    about = "Cumulants of the sample variance for dependent processes, with \
             Gram-Charlier and Edgeworth density expansions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Path to the JSON configuration document.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output artifact path (stdout when omitted). Overrides the config key.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format. Overrides the config key.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormatArg>,
    /// RNG seed for `simulate`. Overrides the config key.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Series order for density/cdf grids: 0, 3, 4, 6 select Gram-Charlier
    /// truncations; 1, 2 select Edgeworth orders. Overrides the config key.
    #[arg(long)]
    pub order: Option<u8>,
    /// Cumulant engine(s) for the `cumulants` artifact. Overrides the
    /// config key.
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum OutputFormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum EngineArg {
    Moment,
    Cumulant,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First four cumulants of the sample variance, from both engines.
    Cumulants(CommonArgs),
    /// Symmetric moment estimator tables.
    Moments(CommonArgs),
    /// Density grid of the truncated series.
    Density(CommonArgs),
    /// CDF grid of the truncated series.
    Cdf(CommonArgs),
    /// Oracle-equivalence checks for the configured process.
    Validate(CommonArgs),
    /// Monte Carlo summary for a Gaussian AR(1) process.
    Simulate(CommonArgs),
    /// Quadratic-form chi-squared exactness test of a covariance matrix.
    ChisqCheck(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Cumulants(args)
            | Command::Moments(args)
            | Command::Density(args)
            | Command::Cdf(args)
            | Command::Validate(args)
            | Command::Simulate(args)
            | Command::ChisqCheck(args) => args,
        }
    }
}

/// Load the config document and fold the CLI overrides into it; the
/// provenance hash covers the folded result.
fn effective_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::from_file(&args.config)?;
    if let Some(out) = &args.out {
        config.out = Some(out.display().to_string());
    }
    if let Some(format) = args.format {
        config.format = Some(match format {
            OutputFormatArg::Json => OutputFormat::Json,
            OutputFormatArg::Csv => OutputFormat::Csv,
        });
    }
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(engine) = args.engine {
        config.engine = Some(match engine {
            EngineArg::Moment => EngineChoice::Moment,
            EngineArg::Cumulant => EngineChoice::Cumulant,
            EngineArg::Both => EngineChoice::Both,
        });
    }
    if let Some(order) = args.order {
        let kind = match order {
            0 | 3 | 4 | 6 => svar_core::ExpansionKind::GramCharlier,
            1 | 2 => svar_core::ExpansionKind::Edgeworth,
            other => {
                return Err(CliError::Config(format!(
                    "violated precondition: --order must be one of 0,3,4,6 (Gram-Charlier) \
                     or 1,2 (Edgeworth); got {other}"
                )))
            }
        };
        config.expansion = Some(ExpansionChoice { kind, order });
    }
    config.validate()?;
    Ok(config)
}

/// Run a parsed command; returns the process exit status.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let config = effective_config(cli.command.args())?;
    match &cli.command {
        Command::Cumulants(_) => commands::cumulants(&config),
        Command::Moments(_) => commands::moments(&config),
        Command::Density(_) => commands::grid(&config, false),
        Command::Cdf(_) => commands::grid(&config, true),
        Command::Validate(_) => commands::validate(&config),
        Command::Simulate(_) => commands::simulate(&config),
        Command::ChisqCheck(_) => commands::chisq_check(&config),
    }
}

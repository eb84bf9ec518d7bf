mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Mode, ModelTag, Overrides, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "timf", version, about = "Mean-field amplitude branches, thresholds and exact checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override any config key, e.g. `--set path.steps=400`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, global = true, value_parser = parse_model)]
    model: Option<ModelTag>,
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tau_resid: Option<f64>,
    #[arg(long, global = true)]
    tau_cluster: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Follow every D, x and y branch along the configured path.
    Trace,
    /// Sample the product of Re x over the configured grid.
    Grid,
    /// Compare branches with the exact amplitude.
    Validate,
    /// Threshold expansions and fitted exponents.
    Thresholds,
    /// Dump the elimination polynomials.
    Derive,
}

fn parse_model(s: &str) -> Result<ModelTag, String> {
    match s {
        "free" => Ok(ModelTag::Free),
        "bound" => Ok(ModelTag::Bound),
        _ => Err(format!("expected free or bound, got {s}")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        _ => Err(format!("expected exact or float, got {s}")),
    }
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let c = cli.common;
    let ov = Overrides {
        set: c.set,
        model: c.model,
        mode: c.mode,
        out_dir: c.out,
        seed: c.seed,
        tau_resid: c.tau_resid,
        tau_cluster: c.tau_cluster,
    };
    let cfg = RunConfig::load(c.config.as_deref(), &ov)?;
    match cli.command {
        Command::Trace => commands::trace(&cfg),
        Command::Grid => commands::grid(&cfg),
        Command::Validate => commands::validate(&cfg),
        Command::Thresholds => commands::thresholds(&cfg),
        Command::Derive => commands::derive(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{f}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("timf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

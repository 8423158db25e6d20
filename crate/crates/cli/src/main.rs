use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rxdf_cli::config::{ExperimentConfig, Kind, FULL_REPS};
use rxdf_cli::recipes::RECIPES;
use rxdf_cli::{configure_workers, execute, reproduce_config, Overrides, RunError};

#[derive(Parser)]
#[command(name = "rxdf", version, about = "Random-X degrees of freedom experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replications, overriding the config.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Use the full-scale replication count (500).
    #[arg(long, global = true, conflicts_with = "reps")]
    full_reps: bool,
    /// Worker threads; capped by RXDF_MAX_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output CSV file, or directory for `reproduce`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run any config; the `kind` key picks the runner.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte Carlo sweep over a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Theory curves, optionally paired with simulations.
    Asymptotics {
        #[arg(long)]
        config: PathBuf,
    },
    /// Covariate-shift scenario grid and attribution.
    Decompose {
        #[arg(long)]
        config: PathBuf,
    },
    /// Data behind a named figure.
    Reproduce {
        figure: Option<String>,
        #[arg(long, conflicts_with = "figure")]
        config: Option<PathBuf>,
    },
    /// List figure ids known to `reproduce`.
    Figures,
}

fn load(path: &PathBuf, expect: Option<Kind>) -> Result<ExperimentConfig, RunError> {
    let cfg = ExperimentConfig::load(path)?;
    if let Some(k) = expect {
        if cfg.kind != k {
            return Err(RunError::Config(format!(
                "{} has kind = \"{}\", expected \"{}\"",
                path.display(),
                cfg.kind.name(),
                k.name()
            )));
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), RunError> {
    let cfg = match &cli.command {
        Command::Figures => {
            for r in RECIPES {
                println!("{:<22}{}", r.id, r.summary);
            }
            return Ok(());
        }
        Command::Run { config } => load(config, None)?,
        Command::Sweep { config } => load(config, Some(Kind::Sweep))?,
        Command::Asymptotics { config } => load(config, Some(Kind::Asymptotics))?,
        Command::Decompose { config } => load(config, Some(Kind::Decompose))?,
        Command::Reproduce { figure, config } => match (figure, config) {
            (Some(f), None) => reproduce_config(f)?,
            (None, Some(c)) => load(c, Some(Kind::Reproduce))?,
            _ => return Err(RunError::Config("reproduce takes a figure id or --config".into())),
        },
    };
    let c = &cli.common;
    let overrides = Overrides {
        seed: c.seed,
        reps: if c.full_reps { Some(FULL_REPS) } else { c.reps },
        out: c.out.clone(),
    };
    let cfg = cfg.with_overrides(&overrides)?;
    configure_workers(c.workers);
    for path in execute(&cfg)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rxdf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

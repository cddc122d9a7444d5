//! `newscast`: news sentiment indicators and real-time GDP forecast
//! evaluation from the command line.
//!
//! Exit status: 0 when every record was processed, 2 when some records or
//! cells were skipped (see the diagnostics file), 1 on a fatal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use newscast::commands::{self, CommandError, CommandOutcome, Status};
use newscast::config::{ExperimentConfig, LoadedConfig};

#[derive(Debug, Parser)]
#[command(name = "newscast", version, about = "News sentiment indicators and real-time GDP forecast evaluation")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores. Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print every diagnostic, not only the count.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse the corpus into CoNLL-U sentences.
    Ingest,
    /// Score every topic mention of the corpus.
    Sentiment,
    /// Daily and monthly indicators, correlations and regime densities.
    Indicators,
    /// Normalize the vintage file and list the GDP targets.
    Vintages,
    /// In-sample inference, out-of-sample forecasts and their evaluation.
    Forecast,
    /// Recompute the evaluation tables from forecasts.csv.
    Evaluate,
    /// Summarize the evaluation in report.txt.
    Report,
    /// Write a synthetic corpus, vintages, regimes and config.
    Synth {
        /// Directory receiving the fixture.
        #[arg(long)]
        out: PathBuf,
        /// Generator parameters (TOML); defaults when absent.
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

fn load(cli: &Cli) -> Result<LoadedConfig, CommandError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CommandError::Fatal("--config is required for this command".into()))?;
    Ok(ExperimentConfig::load(path, cli.seed)?)
}

fn run(cli: &Cli) -> Result<CommandOutcome, CommandError> {
    if let Command::Synth { out, params } = &cli.command {
        let seed = cli
            .seed
            .ok_or_else(|| CommandError::Fatal("synth needs --seed".into()))?;
        let text = match params {
            Some(p) => Some(
                std::fs::read_to_string(p).map_err(|e| CommandError::Fatal(format!("cannot read {}: {e}", p.display())))?,
            ),
            None => None,
        };
        return commands::synth(out, text.as_deref(), seed);
    }
    let cfg = load(cli)?;
    match cli.command {
        Command::Ingest => commands::ingest(&cfg),
        Command::Sentiment => commands::sentiment(&cfg),
        Command::Indicators => commands::indicators(&cfg),
        Command::Vintages => commands::vintages(&cfg),
        Command::Forecast => commands::forecast(&cfg),
        Command::Evaluate => commands::evaluate(&cfg),
        Command::Report => commands::report(&cfg),
        Command::Synth { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs {n}: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if cli.verbose {
                for d in &outcome.diagnostics {
                    eprintln!("warning: {d}");
                }
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            match outcome.status {
                Status::Clean => ExitCode::SUCCESS,
                Status::Partial => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

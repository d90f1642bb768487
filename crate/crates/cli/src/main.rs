use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcl_cli::config::ExperimentConfig;
use qcl_cli::{plot, report, runner, CliError};

/// Continual learning of quantum-state classification tasks on a simulated
/// variational quantum classifier.
#[derive(Parser)]
#[command(name = "qcl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate dataset files (one task or all six).
    Gen {
        /// Task to generate (1..6); mutually exclusive with --all.
        #[arg(long, conflicts_with = "all")]
        task: Option<u8>,
        /// Generate all six tasks into --data-dir.
        #[arg(long)]
        all: bool,
        /// Master seed; per-task seeds are derived from it.
        #[arg(long)]
        seed: u64,
        /// Output file for --task mode.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output directory for --all mode.
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        /// Number of qubits per state.
        #[arg(long, default_value_t = 8)]
        nq: usize,
    },
    /// Run the configured strategies over a task sequence.
    Run {
        /// Experiment configuration file (key=value lines).
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute and print ACC/BWT from a run's summary CSV.
    Report {
        /// Directory holding summary.csv.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Emit learning-curve SVGs from a run's CSV outputs.
    Plot {
        /// Directory holding curves.csv and summary.csv.
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory to write SVG files into.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> qcl_cli::Result<()> {
    match cli.command {
        Command::Gen { task, all, seed, out, data_dir, nq } => match (task, all) {
            (Some(task), false) => {
                let out = out.ok_or_else(|| {
                    CliError::Config("--task mode needs --out <path>".into())
                })?;
                runner::cmd_gen_single(task, nq, seed, &out)
            }
            (None, true) => runner::cmd_gen_all(nq, seed, &data_dir),
            _ => Err(CliError::Config("pass exactly one of --task or --all".into())),
        },
        Command::Run { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            runner::cmd_run(&cfg)?;
            eprintln!("outputs written to {}", cfg.out_dir.display());
            Ok(())
        }
        Command::Report { input } => {
            let table = report::cmd_report(&input)?;
            print!("{table}");
            Ok(())
        }
        Command::Plot { input, out } => {
            let written = plot::cmd_plot(&input, &out)?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

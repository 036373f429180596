use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wganlab_cli::commands;
use wganlab_cli::verify::Suite;
use wganlab_cli::CliError;
use wganlab_core::training::Bounds;

/// Wasserstein GAN regularization laboratory.
#[derive(Parser)]
#[command(name = "wganlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one run and write its log, level sets and checkpoint.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to `out_dir` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train every seed of the config concurrently and aggregate the logs.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent runs (defaults to the available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run an oracle suite and report every check.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Earth mover's distance between two equally sized point files.
    Emd { a: PathBuf, b: PathBuf },
    /// Critic level set of a checkpoint.
    Levelset {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 128)]
        res: usize,
        /// `x0,x1,y0,y1`.
        #[arg(long, value_parser = commands::parse_bounds, allow_hyphen_values = true)]
        bounds: Option<Bounds>,
    },
    /// Print samples of a dataset or of a checkpoint's generator as CSV.
    Sample {
        #[arg(long, conflicts_with = "ckpt")]
        dataset: Option<String>,
        #[arg(long)]
        ckpt: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { config, out } => commands::train(&config, out.as_deref()),
        Command::Sweep { config, out, jobs } => commands::sweep(&config, out.as_deref(), jobs),
        Command::Verify { suite } => commands::verify(suite),
        Command::Emd { a, b } => {
            println!("{}", commands::emd(&a, &b)?);
            Ok(())
        }
        Command::Levelset { ckpt, out, res, bounds } => {
            let path = commands::levelset(&ckpt, &out, res, bounds)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Sample { dataset, ckpt, n, seed } => {
            print!("{}", commands::sample(dataset.as_deref(), ckpt.as_deref(), n, seed)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wganlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

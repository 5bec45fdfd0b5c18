use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deloc_lab::{run_experiment, write_outputs, LabError, LoadOptions, Registry};

#[derive(Parser)]
#[command(
    name = "deloc-lab",
    version,
    about = "Seeded delocalization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        /// Output directory (default: `out_dir` from the config, else `.`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long)]
        threads: Option<usize>,
        /// Master seed, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the registered experiment kinds.
    Kinds,
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    threads: Option<usize>,
    seed: Option<u64>,
) -> Result<(), LabError> {
    let text = std::fs::read_to_string(&config).map_err(|e| {
        LabError::config("<file>", format!("cannot read {}: {e}", config.display()))
    })?;
    let opts = LoadOptions {
        base_dir: config.parent().map(PathBuf::from).unwrap_or_default(),
        seed_override: seed,
    };
    if threads == Some(0) {
        return Err(LabError::config("--threads", "must be at least 1"));
    }
    let cfg = Registry::builtin()
        .validate(&text, &opts)
        .map_err(LabError::Config)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let result = run_experiment(&cfg, threads)?;
    let dir = out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    for path in write_outputs(&cfg, &result, &dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            threads,
            seed,
        } => run(config, out, threads, seed),
        Command::Kinds => {
            for e in Registry::builtin().iter() {
                println!("{:<16} {}", e.name(), e.summary());
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

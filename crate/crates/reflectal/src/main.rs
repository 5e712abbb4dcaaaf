use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reflectal::{cmd_eigen, cmd_manifold, cmd_propagate, cmd_scan, CliError, RunConfig, RunOptions};

/// Complete-reflection control of photodissociation branching.
#[derive(Parser)]
#[command(name = "reflectal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vibrational levels and eigenstates of the ground curve.
    Eigen(Common),
    /// Complete-reflection manifolds, roots and control frequencies.
    Manifold(Common),
    /// Wavepacket branching over a photon-energy grid.
    Scan(Common),
    /// One wavepacket propagation with its time series.
    Propagate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let (Command::Eigen(c) | Command::Manifold(c) | Command::Scan(c) | Command::Propagate(c)) = &cli.command;
    let config = RunConfig::load(&c.config)?;
    let options = RunOptions { out: c.out.clone().unwrap_or_else(|| config.output.clone()), workers: c.workers };
    match cli.command {
        Command::Eigen(_) => cmd_eigen(&config, &options),
        Command::Manifold(_) => cmd_manifold(&config, &options),
        Command::Scan(_) => cmd_scan(&config, &options),
        Command::Propagate(_) => cmd_propagate(&config, &options).map(|(files, s)| {
            let b = s.branching;
            println!("P_I = {:e}  P_I* = {:e}  ratio = {:e}  balance = {:.8}", b.p_i, b.p_istar, b.ratio, s.balance);
            files
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("reflectal: {e}");
            e.exit_code()
        }
    }
}

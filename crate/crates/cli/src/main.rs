use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use resonance_cli::{apply_overrides, run, CliError, Command, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "reslab", version, about = "Homoclinic pseudo-resonance laboratory")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// TOML experiment file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Explicit h values, comma separated; replaces the configured selection.
    #[arg(long, global = true, value_delimiter = ',')]
    h: Vec<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Homoclinic trajectories and their invariants.
    Invariants,
    /// |mu| over a tau grid for each h.
    MuScan,
    /// Admissible h values with mu residuals.
    HSet,
    /// Pseudo-resonances in the solver window.
    PseudoResonances,
    /// Root/lattice pairing per h.
    LatticeCheck,
    /// Instability report with plot data.
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Invariants => Command::Invariants,
            Cmd::MuScan => Command::MuScan,
            Cmd::HSet => Command::HSet,
            Cmd::PseudoResonances => Command::PseudoResonances,
            Cmd::LatticeCheck => Command::LatticeCheck,
            Cmd::Report => Command::Report,
        }
    }
}

fn execute(args: &Args) -> Result<Vec<String>, CliError> {
    let path = args.config.as_ref().ok_or_else(|| CliError::Validation("--config is required".into()))?;
    let overrides = Overrides { out_dir: args.out_dir.clone(), h: args.h.clone(), delta: args.delta, threads: args.threads };
    let cfg = apply_overrides(RunConfig::load(path)?, &overrides)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| run(args.command.into(), &cfg))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("reslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

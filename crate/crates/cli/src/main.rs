use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrw_cli::{cmd_coeffs, cmd_cohomology, cmd_gns, cmd_walk, CliError, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "qrw", version, about = "Quantum random walks from Lindblad generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coefficient order (coeffs) or truncation order (walk)
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Cohomology degree; all of 0, 1, 2 when omitted
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Output file for coeffs and walk
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance overriding the config value for this command
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// GNS bimodule dimensions and identity residual
    Gns,
    /// Hochschild cohomology dimensions per corner of E_L
    Cohomology,
    /// Build the coefficient family and write it to a file
    Coeffs,
    /// Walk convergence report against the semigroup
    Walk,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = ExperimentConfig::load(path)?;
    let ov = Overrides {
        order: cli.order,
        degree: cli.degree,
        out: cli.out.clone(),
        tol: cli.tol,
    };
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Gns => cmd_gns(&cfg, &ov, &mut stdout),
        Command::Cohomology => cmd_cohomology(&cfg, &ov, &mut stdout),
        Command::Coeffs => cmd_coeffs(&cfg, &ov, &mut stdout).map(drop),
        Command::Walk => cmd_walk(&cfg, &ov, &mut stdout).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

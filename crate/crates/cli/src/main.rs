//! `crow` — band structures, EIT susceptibility scans, and light-storage
//! simulations for an atom-doped coupled-resonator waveguide.

mod commands;
mod config;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or config: exit code 1.
    Usage(String),
    /// The computation itself failed: exit code 2.
    Numerical(String),
}

#[derive(Parser)]
#[command(
    name = "crow",
    about = "Polariton bands, EIT susceptibility, and light storage in an atom-doped resonator chain",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polariton band structure and composition over the Brillouin zone
    Bands(RunArgs),
    /// Linear susceptibility scan over detuning or inter-cavity coupling
    Susceptibility(RunArgs),
    /// Adiabatic storage/retrieval protocol for a Gaussian pulse
    Store(RunArgs),
    /// Group-velocity estimate for SI device parameters
    Estimate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (key = value under [section] headers)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Baked-in preset name (fig3a..fig6f, adiabatic, sudden, paper)
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        match (&self.config, &self.preset) {
            (Some(_), Some(_)) => Err(CliError::Usage(
                "pass either --config or --preset, not both".into(),
            )),
            (Some(path), None) => RunConfig::load(path),
            (None, Some(name)) => presets::lookup(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset '{name}'; available: {}",
                    presets::names().join(", ")
                ))
            }),
            (None, None) => Err(CliError::Usage(
                "one of --config or --preset is required".into(),
            )),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, runner): (&RunArgs, fn(&RunConfig, &std::path::Path) -> Result<(), CliError>) =
        match &cli.command {
            Command::Bands(a) => (a, commands::cmd_bands),
            Command::Susceptibility(a) => (a, commands::cmd_susceptibility),
            Command::Store(a) => (a, commands::cmd_store),
            Command::Estimate(a) => (a, commands::cmd_estimate),
        };
    let cfg = args.resolve()?;
    cfg.validate()?;
    commands::dump_config(&cfg, &args.out)?;
    runner(&cfg, &args.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use milne::commands::{self, Output};
use milne::config::{Format, Overrides, RunConfig};
use milne::CliError;

/// Temperature jump at the wall of a massless Bose gas.
///
/// Settings come from built-in defaults, then the `--config` file
/// (`key = value` lines with the flag names, dashes as underscores), then
/// flags; later layers win.
#[derive(Parser, Debug)]
#[command(name = "milne", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// `key = value` settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Jump coefficient: exact, saddle-point and the saddle frequency.
    V1,
    /// Boundary values of the dispersion function and the index.
    Dispersion,
    /// φ(x, μ) over the x and μ grids.
    Profile,
    /// Discrete-ordinates cross-check of the jump coefficient.
    Oracle,
    /// Acceptance suite; exits 1 if any criterion fails.
    Validate,
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match cmd {
        Command::V1 => commands::cmd_v1(cfg),
        Command::Dispersion => commands::cmd_dispersion(cfg),
        Command::Profile => commands::cmd_profile(cfg),
        Command::Oracle => commands::cmd_oracle(cfg),
        Command::Validate => commands::cmd_validate(cfg),
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(cli.config.as_deref(), &cli.flags)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Compute(format!("thread pool: {e}")))?;
    let out = pool.install(|| run(cli.command, &cfg))?;

    for d in &out.envelope.diagnostics {
        eprintln!("warning: {d}");
    }
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &out.body)?;
            if cfg.format == Format::Csv {
                let mut side = path.clone().into_os_string();
                side.push(".envelope.json");
                std::fs::write(side, out.envelope.to_json())?;
            }
        }
        None => std::io::stdout().lock().write_all(out.body.as_bytes())?,
    }
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

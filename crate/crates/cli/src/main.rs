//! `hops`: command-line front end for the hidden-polarization laboratory.

mod commands;
mod config;

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::RunError;
use config::{CommandKind, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hops", version, about = "Hidden polarization and squeezing in a degenerate parametric amplifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with defaults for any of the flags (flags win)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squeezing function and hidden moments over a kt grid (CSV)
    Sweep(Common),
    /// Onset time of hidden-polarization squeezing
    Onset(Common),
    /// Run the internal consistency checks and print the verdict table
    Verify(Common),
    /// Classical Monte-Carlo ensemble statistics (CSV)
    Ensemble(Common),
    /// Printed vs derived vs brute-force hidden moments (CSV)
    Claims(Common),
}

impl Command {
    fn split(self) -> (CommandKind, Common) {
        match self {
            Self::Sweep(c) => (CommandKind::Sweep, c),
            Self::Onset(c) => (CommandKind::Onset, c),
            Self::Verify(c) => (CommandKind::Verify, c),
            Self::Ensemble(c) => (CommandKind::Ensemble, c),
            Self::Claims(c) => (CommandKind::Claims, c),
        }
    }
}

fn execute(kind: CommandKind, common: Common) -> Result<(), RunError> {
    let overrides = match &common.config {
        Some(path) => common.overrides.over(Overrides::from_file(path).map_err(RunError::Usage)?),
        None => common.overrides,
    };
    let config = RunConfig::resolve(kind, &overrides).map_err(RunError::Usage)?;
    match &overrides.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| RunError::Failed(format!("cannot create {}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            let result = commands::run(&config, &mut out);
            out.flush()?;
            result
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            let result = commands::run(&config, &mut out);
            out.flush()?;
            result
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (kind, common) = cli.command.split();
    match execute(kind, common) {
        Ok(()) | Err(RunError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hops {}: {}", kind.name(), e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

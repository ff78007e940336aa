//! `vigil` command-line tool: world validation, decomposition, synthesis,
//! verification, simulation and the simulation service.

mod commands;
pub mod report;
pub mod service;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vigil_core::runtime::{AdversaryPolicy, CompositionMode};
use vigil_core::TriggerMode;

pub use commands::{load_strategies, load_world, synthesize, SynthesisOutput};

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 2;
    pub const UNREALIZABLE: i32 = 3;
    pub const VIOLATED: i32 = 4;
}

/// Environment variable overriding the default belief cap.
pub const CAP_ENV: &str = "VIGIL_CAP";

#[derive(Debug, Parser)]
#[command(name = "vigil", version, about = "Decentralized surveillance strategy synthesis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a world file and print it in canonical form.
    Validate {
        /// World file, or the name of a bundled fixture.
        world: String,
    },
    /// Write one subgame document per region.
    Decompose {
        world: String,
        /// Output directory (documents go to stdout as a JSON array if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the subgames and write strategy files plus report.json.
    Synthesize {
        world: String,
        /// Solve only this subgame (1-based).
        #[arg(long)]
        subgame: Option<usize>,
        #[arg(long, default_value = "literal")]
        trigger_mode: TriggerMode,
        #[command(flatten)]
        cap: CapArg,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Exhaustively check the composed strategies against the global objective.
    Verify {
        world: String,
        /// Directory holding strategy_<i>.json files.
        strategies: PathBuf,
        #[arg(long, default_value = "autonomous")]
        mode: CompositionMode,
        #[command(flatten)]
        cap: CapArg,
        /// Write the verdict here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the composed strategies against a target policy and print an
    /// NDJSON trace.
    Simulate {
        world: String,
        strategies: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
        /// Target policy; interactive reads target cells from stdin.
        #[arg(long, default_value = "random")]
        adversary: AdversaryPolicy,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API and the console assets.
    Serve {
        world: String,
        strategies: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory with the console's static files.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Solve a raw arena file and print winning regions and a strategy.
    SolveArena { arena: PathBuf },
}

#[derive(Debug, Args)]
pub struct CapArg {
    /// Belief-state cap (default: $VIGIL_CAP or 1000000).
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[arg(long, default_value = "autonomous")]
    pub mode: CompositionMode,
    /// Let sensors without a realizable strategy idle.
    #[arg(long)]
    pub allow_partial: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl CapArg {
    pub fn resolve(&self) -> anyhow::Result<usize> {
        if let Some(c) = self.cap {
            anyhow::ensure!(c >= 1, "cap must be positive");
            return Ok(c);
        }
        match std::env::var(CAP_ENV) {
            Ok(v) => {
                let c: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("{CAP_ENV}={v} is not a positive integer"))?;
                anyhow::ensure!(c >= 1, "{CAP_ENV} must be positive");
                Ok(c)
            }
            Err(_) => Ok(vigil_core::DEFAULT_CAP),
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::ERROR } else { exit::OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit::ERROR
        }
    }
}

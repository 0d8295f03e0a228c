//! `sheafmealy`: validate fixtures, run the local-to-global checks, print
//! the gluing landscape and the randomized property suites.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sheafmealy::exec::Execution;
use sheafmealy::local_global::EquivalenceKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "sheafmealy",
    version,
    about = "Local-to-global checks for explanations of finite Mealy machines"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Run every batch on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a fixture file: exit 0 if valid, 1 if invalid, 2 if malformed.
    Validate { path: PathBuf },
    /// Run one check on a fixture (a file path or a built-in name).
    #[command(subcommand)]
    Check(Check),
    /// The built-in fixture corpus.
    #[command(subcommand)]
    Fixtures(Fixtures),
    /// Run the seeded randomized property suites; exit 1 on any violation.
    Props {
        /// Overrides SHEAFMEALY_SEED and the built-in default.
        #[arg(long, env = "SHEAFMEALY_SEED")]
        seed: Option<u64>,
        /// Run one suite only (e.g. beh-separation, helly-d2, vk-cube).
        #[arg(long)]
        suite: Option<String>,
        /// Trial count for --suite (defaults to its acceptance count).
        #[arg(long, requires = "suite")]
        trials: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Compare the two global sections of a separation fixture patch by patch.
    Separation {
        fixture: String,
        /// Equivalence to test under (defaults to the fixture's own).
        #[arg(long, value_enum)]
        relation: Option<Relation>,
    },
    /// Glue the local sections of a gluing fixture up to cogerm equivalence.
    GlueCogerm { fixture: String },
    /// Glue the local sections of a gluing fixture up to behavior.
    GlueBeh {
        fixture: String,
        /// Also search all machines with at most this many states.
        #[arg(long)]
        synthesize: Option<usize>,
    },
    /// Fibers, robust disconnection and the sheaf verdict of a rect-union.
    TameCheck { fixture: String },
    /// Helly obstruction depth of an epsilon fixture.
    EpsDepth {
        fixture: String,
        /// Overrides the fixture's ε.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Restrict to one fiber.
        #[arg(long)]
        fiber: Option<String>,
    },
    /// The separation / gluing table, checked on the built-in fixtures.
    Landscape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Beh,
    Ri,
    Cogerm,
}

impl From<Relation> for EquivalenceKind {
    fn from(r: Relation) -> Self {
        match r {
            Relation::Beh => EquivalenceKind::Beh,
            Relation::Ri => EquivalenceKind::Ri,
            Relation::Cogerm => EquivalenceKind::Cogerm,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Fixtures {
    /// Names, kinds and sources of the built-in fixtures.
    List,
    /// Print one built-in fixture as canonical JSON.
    Dump { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match commands::run(&cli, exec) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

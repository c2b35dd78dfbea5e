//! The `burntrack` command line: argument parsing, dispatch and reports.
//!
//! Every subcommand produces a [`Report`] holding the text output, a JSON
//! object with the same numbers and an exit status. [`run`] renders it and
//! never exits the process, so tests can drive it directly.

mod commands;
mod session;

pub use session::{parse_session, AlphabetDef, AutomDef, GraphMapDef, Item, Session, SubstDef};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::substitutions::DEFAULT_LENGTH_CAP;

/// Environment variable holding the global word-length cap.
pub const LENGTH_CAP_VAR: &str = "BURNTRACK_LENGTH_CAP";

/// Exit status of a successful invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// A definite answer: exit code 0.
    Definite,
    /// Undecided, bounded or budget-limited: exit code 2.
    Undecided,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Definite => 0,
            Status::Undecided => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: Status,
}

impl Report {
    fn definite(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            status: Status::Definite,
        }
    }

    fn undecided(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            status: Status::Undecided,
        }
    }
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug, Parser)]
#[command(
    name = "burntrack",
    version,
    about = "Train tracks, substitutions and Burnside quotients"
)]
pub struct Cli {
    /// Session file with the named objects.
    #[arg(short, long, global = true, default_value = "session.bt")]
    pub session: PathBuf,
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cap on materialized word length; overrides BURNTRACK_LENGTH_CAP.
    #[arg(long, global = true)]
    pub length_cap: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth verdict, plus the strata table for maps with heights.
    Classify { name: String },
    /// Words of the orbit of a word, one per power.
    Orbit {
        map: String,
        word: String,
        #[arg(long)]
        depth: usize,
    },
    /// Largest power index along an orbit.
    PowerIndex {
        map: String,
        seed: String,
        #[arg(long)]
        depth: usize,
    },
    /// Perron-Frobenius eigenvalue, eigenvector and residual.
    Pf { name: String },
    /// Bounded search for a shift-period of a fixed point.
    Period {
        subst: String,
        letter: String,
        #[arg(long)]
        bound: usize,
    },
    /// Yellow/red split and red projection of iterates of a path.
    Red {
        graphmap: String,
        word: String,
        #[arg(long)]
        depth: usize,
    },
    /// Yellow pieces of the iterates of an edge; fails on a yellow loop.
    AuditYellow {
        graphmap: String,
        edge: String,
        #[arg(long)]
        depth: usize,
    },
    /// Elementary moves on a word, or a search for a common descendant.
    Moves {
        word: String,
        #[arg(long)]
        n: u32,
        /// Non-negative rational: `3`, `3/2` or `1.25`.
        #[arg(long, default_value = "0")]
        xi: String,
        /// Replace the derived smallest multiplicity.
        #[arg(long)]
        min_exponent: Option<usize>,
        /// Alphabet from the session; letters of the words otherwise.
        #[arg(long)]
        over: Option<String>,
        #[arg(long)]
        join: Option<String>,
        /// Distinct words the search may store.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 32)]
        max_depth: usize,
    },
    /// Order of the automorphism induced on the free Burnside group.
    BurnsideOrder {
        autom: String,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        exp: u32,
        #[arg(long, default_value_t = 10_000)]
        max_k: u64,
    },
    /// Coset enumeration of a finite presentation.
    Tc {
        #[arg(long)]
        rank: usize,
        /// One relator per line; `#` starts a comment.
        #[arg(long)]
        relators: PathBuf,
        #[arg(long)]
        over: Option<String>,
        #[arg(long, default_value_t = 1 << 21)]
        max_cosets: usize,
        /// Write the coset table here as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the session in canonical form.
    Dump,
}

/// Length cap from the flag, then the environment, then the default.
pub fn length_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(LENGTH_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{LENGTH_CAP_VAR}=`{v}` is not a length"))),
        Err(_) => Ok(DEFAULT_LENGTH_CAP),
    }
}

/// Runs one parsed command line.
pub fn execute(cli: &Cli, warnings: &mut Vec<String>) -> Result<Report> {
    let cap = length_cap(cli.length_cap)?;
    commands::dispatch(cli, cap, warnings)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    stdout: String::new(),
                    stderr: text,
                    code: 1,
                }
            } else {
                Invocation {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            };
        }
    };
    let mut warnings = Vec::new();
    let result = execute(&cli, &mut warnings);
    let mut stderr: String = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    match result {
        Ok(report) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
                s.push('\n');
                s
            } else {
                report.text
            };
            Invocation {
                stdout,
                stderr,
                code: report.status.code(),
            }
        }
        Err(e) => {
            stderr.push_str(&format!("error: {e}\n"));
            Invocation {
                stdout: String::new(),
                stderr,
                code: 1,
            }
        }
    }
}

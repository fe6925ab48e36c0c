//! `polyop`: command-line access to the polynomial-functor library.
//!
//! Every command prints one JSON report (or its text rendering) on stdout.
//! Exit codes: 0 success, 1 a checked property fails, 2 usage error,
//! 3 input error, 4 guard exceeded.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyop::{Error, Guard};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "polyop", version, about = "Polynomial functors, trees, free monads and dendroidal nerves")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Enumeration limit; overrides POLYOP_GUARD.
    #[arg(long, env = "POLYOP_GUARD", global = true)]
    pub guard: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Poly,
    Tree,
    Monad,
    Presheaf,
    Symseq,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a file describes a well-formed object.
    Validate {
        file: PathBuf,
        #[arg(long = "as", value_enum, default_value_t = Kind::Poly)]
        kind: Kind,
    },
    /// Evaluate a polynomial on a family of sets.
    Eval { poly: PathBuf, family: PathBuf },
    /// The composite `Q ∘ P`.
    Compose { q: PathBuf, p: PathBuf },
    /// Trees up to isomorphism.
    Trees {
        #[arg(long)]
        max_nodes: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// P-trees of bounded height.
    Ptrees {
        poly: PathBuf,
        #[arg(long)]
        height: usize,
    },
    /// The free monad truncated at a height, built two ways.
    Freemonad {
        poly: PathBuf,
        #[arg(long)]
        height: usize,
    },
    /// The initial algebra by iterating from the empty family.
    Wtype {
        poly: PathBuf,
        #[arg(long, default_value_t = 16)]
        max_iter: usize,
    },
    /// Twisting maps for a coalgebra and an algebra.
    Twist { instance: PathBuf },
    /// Monad laws.
    Laws { monad: PathBuf },
    /// Morphisms of the dendroidal category.
    Omega {
        #[command(subcommand)]
        action: OmegaAction,
    },
    /// Nerve of a monad on one tree, or as a presheaf on small trees.
    Nerve {
        monad: PathBuf,
        #[arg(long, conflicts_with = "max_nodes")]
        tree: Option<PathBuf>,
        #[arg(long, required_unless_present = "tree")]
        max_nodes: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_arity: usize,
        /// Also include the trees and maps needed to rebuild the monad.
        #[arg(long)]
        rebuild_data: bool,
    },
    /// Segal condition for a presheaf.
    Segal {
        presheaf: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Rebuild a monad from the presheaf.
        #[arg(long)]
        to_monad: bool,
    },
    /// Exponential generating function of a symmetric sequence.
    Egf {
        symseq: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Cardinalities of evaluations and composites.
    Card {
        symseq: PathBuf,
        #[arg(long, required_unless_present = "compose")]
        x: Option<usize>,
        /// Inner symmetric sequence for composite counts.
        #[arg(long, requires = "n")]
        compose: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OmegaAction {
    /// All morphisms `S → T`.
    Hom { s: PathBuf, t: PathBuf },
    /// `g ∘ f`.
    Compose { g: PathBuf, f: PathBuf },
    /// Active–inert factorization.
    Factorize { f: PathBuf },
}

/// A command that could not produce a report.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            kind: "input",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::GuardExceeded { .. } => "guard_exceeded",
            Error::Shape(_) | Error::OutOfRange { .. } => "shape",
            Error::NotInjective(_) | Error::NotBijective(_) => "not_bijective",
            Error::TreeAxiom { .. } | Error::NotALeaf(_) => "tree",
            Error::NonzeroConstantTerm | Error::MultiColour | Error::Truncation { .. } => "series",
            Error::InvalidAction(_) => "action",
            Error::Inconsistent(_) => "inconsistent",
            Error::MissingDomain(_) => "missing_domain",
            Error::NotSegal(_) => "not_segal",
            Error::OutsideTruncation(_) => "outside_truncation",
        };
        let code = if kind == "guard_exceeded" { 4 } else { 3 };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

/// A finished report and whether the properties it checks hold.
pub struct Report {
    pub body: Value,
    pub passed: bool,
}

impl Report {
    pub fn ok(body: Value) -> Self {
        Report { body, passed: true }
    }

    pub fn check(body: Value, passed: bool) -> Self {
        Report { body, passed }
    }
}

fn render(mut body: Value, format: Format) -> String {
    if let Value::Object(map) = &mut body {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    match format {
        Format::Json => serde_json::to_string_pretty(&body).expect("reports are plain JSON"),
        Format::Text => match body {
            Value::Object(map) => map
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}: {s}"),
                    other => format!("{k}: {other}"),
                })
                .collect::<Vec<_>>()
                .join("\n"),
            other => other.to_string(),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guard = cli.guard.map(Guard).unwrap_or_default();
    let (body, code) = match commands::run(&cli.command, guard) {
        Ok(r) => (r.body, if r.passed { 0 } else { 1 }),
        Err(f) => (
            json!({"error": {"kind": f.kind, "message": f.message}}),
            f.code,
        ),
    };
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout(), "{}", render(body, cli.format));
    ExitCode::from(code)
}

//! `modinv` command-line front end: JSON problem in, JSON report out.

mod commands;
mod ledger;
mod report;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modinv::cohomology::Model;

/// Exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_EXHAUSTED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_AUDIT: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_INPUT, kind: "input", message: message.into() }
    }
    pub fn audit(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_AUDIT, kind: "audit", message: message.into() }
    }
}

impl From<modinv::Error> for CliError {
    fn from(e: modinv::Error) -> CliError {
        use modinv::Error as E;
        let (code, kind) = match e {
            E::Audit(_) => (EXIT_AUDIT, "audit"),
            E::WindowTooSmall(_) | E::Budget { .. } => (EXIT_EXHAUSTED, "window"),
            _ => (EXIT_INPUT, "input"),
        };
        CliError { code, kind, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "modinv", version, about = "Modular invariant theory workbench")]
struct Cli {
    /// Embed cocycle representatives and action matrices in the report.
    #[arg(long, global = true)]
    with_witnesses: bool,
    /// Run pipelines that are expected to be slow.
    #[arg(long, global = true)]
    allow_slow: bool,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    Bar,
    Periodic,
}

impl ModelArg {
    pub fn model(self) -> Model {
        match self {
            ModelArg::Bar => Model::Bar,
            ModelArg::Periodic => Model::Periodic,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            ModelArg::Bar => "bar",
            ModelArg::Periodic => "periodic",
        }
    }
}

#[derive(Args)]
pub struct SpecArg {
    /// Problem definition (JSON).
    pub spec: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Bases of the invariant slices S_n.
    Invariants {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// The Dickson top class and the Dickson family.
    Dickson {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Steenrod operations P^i of a polynomial.
    Steenrod {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        poly: String,
        /// Largest i; defaults to the degree of the polynomial.
        #[arg(long)]
        max_i: Option<usize>,
    },
    /// Dimensions of H^i(G, R_m).
    Cohomology {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value = "bar")]
        model: ModelArg,
    },
    /// Nilpotency of an invariant (default: the Dickson top class) on H^i(G, R).
    VerifyMain(commands::MainArgs),
    /// Nilpotency of an invariant on local cohomology H^j via Ext over an hsop.
    VerifyLoc(commands::LocArgs),
    /// Colon-quotient and Koszul-homology annihilation tables from a ledger.
    VerifyCorollaries(commands::CorollaryArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = commands::Options { with_witnesses: cli.with_witnesses, allow_slow: cli.allow_slow };
    let (name, result) = match &cli.command {
        Command::Invariants { spec, max_degree } => ("invariants", commands::invariants(&spec.spec, *max_degree)),
        Command::Dickson { spec } => ("dickson", commands::dickson(&spec.spec)),
        Command::Steenrod { spec, poly, max_i } => ("steenrod", commands::steenrod(&spec.spec, poly, *max_i)),
        Command::Cohomology { spec, i, max_degree, model } => {
            ("cohomology", commands::cohomology(&spec.spec, *i, *max_degree, *model, &opts))
        }
        Command::VerifyMain(a) => ("verify-main", commands::verify_main(a, &opts)),
        Command::VerifyLoc(a) => ("verify-loc", commands::verify_loc(a, &opts)),
        Command::VerifyCorollaries(a) => ("verify-corollaries", commands::verify_corollaries(a, &opts)),
    };
    let (doc, code) = match result {
        Ok(out) => (out.report, out.code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            (report::error(name, &e), e.code)
        }
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}

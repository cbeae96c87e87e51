//! `archevol`: validate architectures, check styles, apply evolution
//! operations, run evolution patterns and analyze rules.
//!
//! Exit status: 0 success, 1 violations or a refused operation, 2 usage or
//! input errors, 3 internal errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use archevol_core::rewrite::DEFAULT_MAX_REWRITES;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "archevol", version, about = "Architecture evolution by typed graph rewriting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Table,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Create,
    Delete,
    #[value(alias = "movePort")]
    MovePort,
    #[value(alias = "splitComponent")]
    Split,
    #[value(alias = "mergeComponents")]
    Merge,
    #[value(alias = "moveIn")]
    MoveIn,
    #[value(alias = "moveOut")]
    MoveOut,
    #[value(alias = "delegatePort")]
    Delegate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinRules {
    ClientServerRules,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinSequence {
    ServerIntro,
    ClientIntro,
}

#[derive(Args)]
pub struct OpArgs {
    /// Operation to apply.
    #[arg(long, required_unless_present = "descriptor")]
    pub op: Option<Op>,
    /// Component (`A/B`) or port (`A/B#p`) the operation works on.
    #[arg(long, default_value = "")]
    pub context: String,
    /// Parent for move-in.
    #[arg(long)]
    pub parent: Option<String>,
    /// Ports moved by split.
    #[arg(long, value_delimiter = ',')]
    pub ports: Vec<String>,
    /// New component name for create, split and merge.
    #[arg(long)]
    pub name: Option<String>,
    /// Target component for move-port.
    #[arg(long)]
    pub target: Option<String>,
    /// Components merged into the context component.
    #[arg(long, value_delimiter = ',')]
    pub with: Vec<String>,
    /// Kind for create: plain, client or server.
    #[arg(long)]
    pub kind: Option<String>,
    /// Operation descriptor document instead of the flags above.
    #[arg(long, conflicts_with = "op")]
    pub descriptor: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check an architecture against the metamodel and base invariants.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Check an architecture against a built-in style or a style document.
    CheckStyle {
        file: PathBuf,
        /// Style name or path to a style document.
        #[arg(long)]
        style: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Apply one evolution operation.
    Apply {
        file: PathBuf,
        #[command(flatten)]
        op: OpArgs,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run an evolution pattern with scripted decisions.
    Pattern {
        file: PathBuf,
        #[arg(long)]
        pattern: String,
        /// Decision script document.
        #[arg(long)]
        script: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Critical pair analysis over a rule set.
    Cpa {
        /// Rule or rule-set documents.
        rules: Vec<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<BuiltinRules>,
        /// Style whose type graph and constraints filter overlaps.
        #[arg(long)]
        style: Option<String>,
        #[arg(long)]
        max_overlap: Option<usize>,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Table)]
        format: MatrixFormat,
    },
    /// Applicability analysis of a rule sequence.
    Sequence {
        #[arg(long, value_enum, conflicts_with_all = ["rules", "order"])]
        builtin: Option<BuiltinSequence>,
        /// Rule or rule-set documents the sequence refers to.
        #[arg(long, requires = "order")]
        rules: Vec<PathBuf>,
        /// Sequence text such as `A; (B)*`.
        #[arg(long)]
        order: Option<String>,
        /// Architecture to run the sequence on.
        #[arg(long)]
        host: Option<PathBuf>,
        /// Rule parameter binding `key=value`.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Node types assumed present for the static check.
        #[arg(long, value_delimiter = ',')]
        assume: Option<Vec<String>>,
        #[arg(long, env = "ARCHEVOL_MAX_REWRITES", default_value_t = DEFAULT_MAX_REWRITES)]
        max_rewrites: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// List built-in styles, patterns and operations.
    List,
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
        /// Origin allowed by CORS, such as the web UI's.
        #[arg(long)]
        allow_origin: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}

mod commands;
mod config;
mod tree;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing::level_filters::LevelFilter;
use veriact_core::benchkit::BatchMode;

use config::{BackendKind, GlobalConfig, ProviderKind, Verbosity};

pub const EXIT_OK: u8 = 0;
/// The analysis ran and found a problem, e.g. a contract that is not
/// meaningfully verified.
pub const EXIT_FAILURES: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BACKEND: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "veriact",
    about = "Evaluate, verify and generate JML contracts for Java methods",
    disable_version_flag = true,
    arg_required_else_help = true
)]
struct Cli {
    /// TOML configuration file; see config/veriact.example.toml.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Silence diagnostics. Reports and exit codes are unaffected.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// Print tool, schema and pattern-table versions.
    #[arg(short = 'V', long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a method's contract and print its expression tree.
    Parse {
        file: PathBuf,
        /// Defaults to the only annotated method.
        #[arg(long)]
        method: Option<String>,
    },
    /// Evaluate a JML expression under concrete bindings.
    Eval {
        expr: String,
        /// `name=value` bindings; several may be joined with `;`.
        #[arg(long = "env", value_name = "BINDINGS")]
        env: Vec<String>,
        /// Value of `\result`.
        #[arg(long)]
        result: Option<String>,
    },
    /// Print the mutants of an output value, one per line.
    Mutate {
        value: String,
        /// Mutants to draw.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score a method's contract against a test suite.
    Harness {
        task: PathBuf,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_enum)]
        backend: Option<BackendKind>,
        /// Defaults to the method named by the suite.
        #[arg(long)]
        method: Option<String>,
        /// Mutants per output.
        #[arg(long)]
        k: Option<usize>,
        /// Use only the first N suite pairs.
        #[arg(long)]
        max_pairs: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Record per-check wall clock.
        #[arg(long)]
        timings: bool,
    },
    /// Verify an annotated Java file.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum)]
        backend: Option<BackendKind>,
        /// Required by the builtin backend.
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Defaults to the method named by the suite, then the only annotated method.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Classify a saved verifier log and print its graduated score.
    Score {
        log: PathBuf,
        /// Exit status of the verifier run that produced the log.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        exit_code: i32,
    },
    /// Rename the class to Solution and the method to solve.
    Normalize {
        file: PathBuf,
        /// Defaults to the only annotated method.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the contract-generation agent on one method. Existing JML in the
    /// task file is removed first.
    Agent {
        task: PathBuf,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_enum)]
        provider: Option<ProviderKind>,
        /// Response script for the scripted provider.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Verifier backend.
        #[arg(long, value_enum)]
        backend: Option<BackendKind>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Write the trajectory here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Evaluate every task in a manifest.
    Batch {
        manifest: PathBuf,
        /// classify, harness or agent.
        #[arg(long)]
        mode: BatchMode,
        /// Write report.json, tasks.csv and summary.csv here instead of
        /// printing the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum)]
        backend: Option<BackendKind>,
        #[arg(long)]
        provider: Option<ProviderKind>,
        /// Script file shared by all tasks, or a directory of `<id>.script.json`.
        #[arg(long)]
        script: Option<PathBuf>,
    },
}

fn version_text() -> String {
    use veriact_core::{agent, benchkit, harness, testkit, verify};
    format!(
        "veriact {}\nharness report schema {}\ntrajectory schema {}\nsuite schema {}\nresponse script schema {}\nmanifest schema {}\nbatch report schema {}\npattern table {}\n",
        env!("CARGO_PKG_VERSION"),
        harness::REPORT_SCHEMA_VERSION,
        agent::TRAJECTORY_SCHEMA_VERSION,
        testkit::suite::SUITE_SCHEMA_VERSION,
        agent::SCRIPT_SCHEMA_VERSION,
        benchkit::MANIFEST_SCHEMA_VERSION,
        benchkit::BATCH_SCHEMA_VERSION,
        verify::PatternTable::builtin().version,
    )
}

fn init_diagnostics(quiet: bool, verbosity: Verbosity) {
    let level = match (quiet, verbosity) {
        (true, _) => LevelFilter::OFF,
        (false, Verbosity::Error) => LevelFilter::ERROR,
        (false, Verbosity::Warn) => LevelFilter::WARN,
        (false, Verbosity::Info) => LevelFilter::INFO,
        (false, Verbosity::Debug) => LevelFilter::DEBUG,
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_max_level(level)
        .without_time()
        .with_target(false)
        .with_ansi(false)
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.version {
        print!("{}", version_text());
        return ExitCode::from(EXIT_OK);
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required\n\nUsage: veriact [OPTIONS] <COMMAND>\n\nFor more information, try '--help'.");
        return ExitCode::from(EXIT_USAGE);
    };
    let cfg = match &cli.config {
        Some(path) => GlobalConfig::load(path),
        None => Ok(GlobalConfig::default()),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            if !cli.quiet {
                eprintln!("error: config {e}");
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };
    init_diagnostics(cli.quiet, cfg.verbosity);
    match commands::run(command, &cfg) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            tracing::error!("{}", e.message);
            ExitCode::from(e.code)
        }
    }
}

//! Command-line front end for `bvac`: sweeps, searches, oracle comparisons
//! and seeded property suites, written as CSV or JSON.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 1 for
//! computational failures (and for `verify` when a suite fails).

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;

use config::{Cli, Command, RunConfig};
use output::{Cell, Fields, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("computation failed: {0}")]
    Compute(bvac::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// Precondition violations caught by the core count as usage errors.
    pub fn from_core(e: bvac::Error) -> Self {
        use bvac::Error as E;
        match e {
            E::Geometry(_)
            | E::BehindWall { .. }
            | E::InvalidArgument(_)
            | E::Lattice(_)
            | E::NodeBudget { .. }
            | E::OverlappingBoxes
            | E::EmptyScan
            | E::TooFewSamples { .. }
            | E::RegulatorTooSmall { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

fn verify_report(cfg: &RunConfig) -> (Report, bool) {
    let suites = verify::run_suites(cfg.seed, cfg.samples);
    let mut inputs = Fields::new();
    for (k, v) in &cfg.inputs {
        inputs.push(k, v.as_str());
    }
    let mut report = Report::new(
        "verify",
        inputs,
        vec!["suite", "passed", "cases", "failures", "worst", "tolerance"],
    );
    for s in &suites {
        report.push_row(vec![
            s.name.into(),
            s.passed().into(),
            s.cases.into(),
            s.failures.into(),
            Cell::Num(s.worst),
            Cell::Num(s.tolerance),
        ]);
    }
    let failed: Vec<Cell> = suites.iter().filter(|s| !s.passed()).map(|s| s.name.into()).collect();
    let all_passed = failed.is_empty();
    report.diagnostics.push("seed", cfg.seed);
    report.diagnostics.push("samples", cfg.samples);
    report.diagnostics.push("suites", suites.len());
    report.diagnostics.push("failed_suites", Cell::List(failed));
    report.diagnostics.push("all_passed", all_passed);
    (report, all_passed)
}

fn execute(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (report, status) = match cfg.command {
        Command::Components => (commands::components_cmd(cfg)?, EXIT_OK),
        Command::Scan => (commands::scan_cmd(cfg)?, EXIT_OK),
        Command::FindMax => (commands::find_max_cmd(cfg)?, EXIT_OK),
        Command::Casimir => (commands::casimir_cmd(cfg)?, EXIT_OK),
        Command::OracleMomentum => (commands::oracle_momentum_cmd(cfg)?, EXIT_OK),
        Command::OracleLattice => (commands::oracle_lattice_cmd(cfg)?, EXIT_OK),
        Command::Verify => {
            let (report, all_passed) = verify_report(cfg);
            if !all_passed {
                writeln!(err, "verify: at least one property suite failed (seed {})", cfg.seed)?;
            }
            (report, if all_passed { EXIT_OK } else { EXIT_FAILURE })
        }
    };
    match &cfg.out {
        Some(path) => {
            let file = File::create(path)?;
            let mut w = BufWriter::new(file);
            report.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => report.write(cfg.format, out)?,
    }
    Ok(status)
}

/// Parse `args` (including the program name) and run one subcommand.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
        // --help and --version
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let mut flags = cli.flags;
    let result = flags
        .merge_config_file()
        .and_then(|_| RunConfig::from_flags(cli.command, &flags))
        .and_then(|cfg| execute(&cfg, out, err));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "bvac {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let stderr = io::stderr();
    let mut err = stderr.lock();
    let code = run_with(args, &mut out, &mut err);
    let _ = out.flush();
    code
}

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hhcf::job::{self, Job, Outcome};
use hhcf::Error;

#[derive(Parser)]
#[command(name = "hhcf", version, about = "Hyperelliptic Halphen continued fractions")]
struct Cli {
    /// Default precision in bits when the job file does not set one.
    #[arg(long, env = "HHCF_PRECISION_BITS", global = true)]
    precision_bits: Option<u32>,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Branch tree of the expansion.
    Expand { job: PathBuf },
    /// Continuants and the checks on their degrees and orders.
    Convergents {
        job: PathBuf,
        /// Print a table instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// Even and odd symmetries along the longest path.
    Symmetry { job: PathBuf },
    /// Ramification, morphism, index and divisor at the job's point.
    Curve { job: PathBuf },
    /// Distinct-value counts of the divisor dynamics.
    Growth {
        job: PathBuf,
        /// Also write the counts as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Every applicable check on the job.
    Verify { job: PathBuf },
}

fn diag(level: &str, code: &str, message: &str) {
    eprintln!("{level} {code} {message}");
}

fn fail(err: &Error) -> ExitCode {
    diag("ERROR", err.code(), &err.to_string());
    ExitCode::from(if err.is_input_error() { 2 } else { 3 })
}

fn load(path: &PathBuf, bits: Option<u32>) -> Result<Job, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        diag("ERROR", "Io", &format!("{}: {e}", path.display()));
        ExitCode::from(2)
    })?;
    Job::parse(&text, bits).map_err(|e| fail(&e))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), ExitCode> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            diag("ERROR", "Io", &format!("{}: {e}", path.display()));
            ExitCode::from(2)
        }),
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                diag("ERROR", "Io", &format!("stdout: {e}"));
                Err(ExitCode::from(2))
            }
            _ => Ok(()),
        },
    }
}

fn finish(outcome: &Outcome) -> ExitCode {
    for f in &outcome.failures {
        diag("WARN", "CheckFailed", f);
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let bits = cli.precision_bits;
    let (job_path, as_table) = match &cli.command {
        Command::Expand { job }
        | Command::Symmetry { job }
        | Command::Curve { job }
        | Command::Verify { job }
        | Command::Growth { job, .. } => (job, false),
        Command::Convergents { job, table } => (job, *table),
    };
    let job = load(job_path, bits)?;
    let outcome = match &cli.command {
        Command::Expand { .. } => job::run_expand(&job),
        Command::Convergents { .. } => job::run_convergents(&job),
        Command::Symmetry { .. } => job::run_symmetry(&job),
        Command::Curve { .. } => job::run_curve(&job),
        Command::Verify { .. } => job::run_verify(&job),
        Command::Growth { csv, .. } => job::run_growth(&job).and_then(|(outcome, text)| {
            if let Some(path) = csv {
                fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            }
            Ok(outcome)
        }),
    }
    .map_err(|e| fail(&e))?;
    let text = match (&outcome.table, as_table) {
        (Some(table), true) => table.clone(),
        _ => serde_json::to_string_pretty(&outcome.document).expect("document serializes"),
    };
    emit(&text, &cli.out)?;
    Ok(finish(&outcome))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) | Err(code) => code,
    }
}

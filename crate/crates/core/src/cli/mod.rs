//! Command-line front end. [`run`] parses arguments, owns the worker pool and maps
//! errors to exit codes; the binary only forwards to it.

mod group_entropy;
mod pmf_file;
mod region;
mod simulate;
mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{invalid, Error, Result};

pub use group_entropy::GroupEntropyArgs;
pub use pmf_file::parse_pmf_file;
pub use region::{parse_tau_spec, RegionArgs, RegionFamily};
pub use simulate::SimulateArgs;
pub use verify::{run_battery, CheckOutcome, CheckStatus, VerifyArgs};

/// Environment variable holding the default number of worker threads.
pub const WORKERS_ENV: &str = "COSET_MAC_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "coset-mac",
    version,
    about = "Rate regions and coset-code simulation for state-dependent MACs"
)]
pub struct Cli {
    /// Worker threads for searches and simulations (default: all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum-rate versus cost curves as CSV.
    Region(RegionArgs),
    /// Monte Carlo simulation of random nested coset codes.
    Simulate(SimulateArgs),
    /// Group information quantities of a pmf read from a file.
    GroupEntropy(GroupEntropyArgs),
    /// Exhaustive and sampled checks of the coding and typicality properties.
    Verify(VerifyArgs),
}

/// Where CSV output goes.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    fn with_writer(
        &self,
        out: &mut dyn Write,
        f: impl FnOnce(&mut dyn Write) -> Result<()>,
    ) -> Result<()> {
        match &self.output {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| Error::Validation(format!("--output {}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                f(&mut w)?;
                w.flush().map_err(io_err)
            }
            None => f(out),
        }
    }
}

pub(crate) fn io_err(e: std::io::Error) -> Error {
    Error::Internal(format!("i/o: {e}"))
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Internal(_) => EXIT_VALIDATION,
        Error::Budget { .. } => EXIT_BUDGET,
    }
}

fn dispatch(cli: Cli, out: &mut (dyn Write + Send)) -> Result<i32> {
    match cli.command {
        Command::Region(a) => region::run(&a, out).map(|_| EXIT_OK),
        Command::Simulate(a) => simulate::run(&a, out).map(|_| EXIT_OK),
        Command::GroupEntropy(a) => group_entropy::run(&a, out).map(|_| EXIT_OK),
        Command::Verify(a) => verify::run(&a, out),
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.workers {
        Some(0) => invalid(format!("--workers (or {WORKERS_ENV}) must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Internal(format!("worker pool: {e}")))
            .and_then(|pool| pool.install(|| dispatch(cli, out))),
        None => dispatch(cli, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

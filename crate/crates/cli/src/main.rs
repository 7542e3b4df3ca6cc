//! `sumrule-lab`: batch runner for sum-rule checks, polynomial asymptotics and
//! the whole-line appendix invariants.
//!
//! Exit codes: 0 when every case passes, 1 on a numerical failure, 2 on a usage
//! or configuration error.

mod appendix;
mod asymptotics;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{config_err, load_file, Failure, Merge};

#[derive(Args)]
struct Common {
    /// JSON file with the command's options; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; output order does not depend on it
    #[arg(long, env = "SUMRULE_JOBS", global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare both sides of the sum rule
    Verify(verify::VerifyOpts),
    /// Convergence of normalized orthogonal polynomials to their limit
    Asymptotics(asymptotics::AsymptoticsOpts),
    /// Whole-line band, positivity and expansion checks
    Appendix(appendix::AppendixOpts),
}

#[derive(Parser)]
#[command(name = "sumrule-lab", version, about = "Sum rules for Jacobi matrices, as reproducible batch runs")]
struct Top {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn dispatch(top: Top) -> Result<(), Failure> {
    let path = top.common.config.as_deref();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(top.common.jobs.unwrap_or(0)).build().map_err(config_err)?;
    match top.command {
        Command::Verify(o) => {
            let o = o.merge(load_file(path)?);
            pool.install(|| verify::run(o))
        }
        Command::Asymptotics(o) => {
            let o = o.merge(load_file(path)?);
            pool.install(|| asymptotics::run(o))
        }
        Command::Appendix(o) => {
            let o = o.merge(load_file(path)?);
            pool.install(|| appendix::run(o))
        }
    }
}

fn main() -> ExitCode {
    let top = Top::parse();
    match dispatch(top) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sumrule-lab: {f}");
            ExitCode::from(f.code())
        }
    }
}

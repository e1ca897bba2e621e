//! `cvs-sim`: batch driver for squeezed single-photon sampling experiments.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Loaded, Overrides};
use error::CliError;
use output::OutputDir;

#[derive(Parser)]
#[command(
    name = "cvs-sim",
    version,
    about = "Probabilities, Fock-space cross-checks and samples for squeezed single-photon circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "cvs-out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fock cutoff (photons per mode, or total photons for large mode counts).
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Bin width; overrides `circuit.eta`.
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Worker threads; falls back to CVS_SIM_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Embed X into a symmetric orthogonal Sigma.
    Embed,
    /// Closed-form pattern probability and origin density.
    Prob,
    /// Compare the formulas against the Fock-space oracle.
    Oracle,
    /// Draw binned outcome samples.
    Sample,
    /// Tabulate kappa(k, l) and its maximizer.
    Scan,
    /// Factor the interferometer as O1 exp(i phi Delta) O2.
    Kak,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Embed => "embed",
            Command::Prob => "prob",
            Command::Oracle => "oracle",
            Command::Sample => "sample",
            Command::Scan => "scan",
            Command::Kak => "kak",
        }
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("CVS_SIM_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::Validation(format!("CVS_SIM_THREADS = {v:?} is not a thread count"))
        }),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = threads(cli.threads)? {
        if n == 0 {
            return Err(CliError::Validation("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    let overrides = Overrides {
        seed: cli.seed,
        cutoff: cli.cutoff,
        eta: cli.eta,
    };
    let loaded = Loaded::read(cli.config.as_deref(), &overrides)?;
    let mut out = OutputDir::create(&cli.out)?;
    let name = cli.command.name();
    let mut failure = None;
    match cli.command {
        Command::Embed => commands::embed(&loaded, &mut out)?,
        Command::Prob => commands::prob(&loaded, &mut out)?,
        Command::Oracle => {
            let tol = loaded.config.oracle.clone().unwrap_or_default().tolerance;
            let err = commands::oracle(&loaded, &mut out)?;
            if !(err <= tol) {
                failure = Some(CliError::Numeric(format!(
                    "oracle relative error {err:e} exceeds {tol:e}"
                )));
            }
        }
        Command::Sample => commands::sample(&loaded, &mut out)?,
        Command::Scan => commands::scan(&loaded, &mut out)?,
        Command::Kak => commands::kak(&loaded, &mut out)?,
    }
    let manifest = out.finish(
        name,
        &loaded.config,
        loaded.seed(),
        commands::tolerances(name, &loaded),
    )?;
    println!("{}", manifest.display());
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvs-sim: {e}");
            e.exit_code()
        }
    }
}

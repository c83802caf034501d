//! `dlab`: batch driver for the composition-operator experiments.
//!
//! Exit codes: 0 all certificates pass, 1 a certificate failed, 2 usage,
//! configuration or output-directory error, 3 numeric-integrity error.

mod config;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use config::{Experiment, ExperimentConfig, Params};

/// Thread count for the parallel parts; defaults to all cores.
const THREADS_VAR: &str = "DLAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dlab_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Core(dlab_core::Error::Validation(_)) => 2,
            CliError::Core(dlab_core::Error::Construction(_) | dlab_core::Error::Inapplicable(_)) => 1,
            CliError::Core(dlab_core::Error::NumericIntegrity(_)) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dlab", version, about = "Composition operators on the Dirichlet space: certified experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gram matrix of the disk family, diagonal-dominance and floor certificates.
    CuspGram(Params),
    /// Carleson window index h^-2 rho(h) on h = delta^j.
    CuspRho(Params),
    /// Galerkin eigenvalues of the Toeplitz compression for K/4, K/2, K.
    CuspGalerkin(Params),
    /// Norms of the powers of the rectilinear symbol.
    EksyGrowth(Params),
    /// Half-window and window masses of the rectilinear symbol.
    EksyWindows(Params),
    /// Clamp and slow-decay regularization of a raw null sequence.
    SeqDemo(Params),
    /// Run an experiment described by a JSON file; flags override its fields.
    Run {
        config: PathBuf,
        #[command(flatten)]
        params: Params,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let (exp, params) = match cli.command {
        Command::CuspGram(p) => (Experiment::CuspGram, p),
        Command::CuspRho(p) => (Experiment::CuspRho, p),
        Command::CuspGalerkin(p) => (Experiment::CuspGalerkin, p),
        Command::EksyGrowth(p) => (Experiment::EksyGrowth, p),
        Command::EksyWindows(p) => (Experiment::EksyWindows, p),
        Command::SeqDemo(p) => (Experiment::SeqDemo, p),
        Command::Run { config, params } => {
            let c = ExperimentConfig::load(&config)?;
            (c.experiment, params.over(c.params))
        }
    };
    let cfg = params.resolve()?;
    let report = run::run(exp, &cfg)?;
    for c in report.failures() {
        eprintln!("FAIL {} value={:e} bound={:e}", c.name, c.value, c.bound);
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

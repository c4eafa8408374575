//! `nsc`: generate sensing matrices, extract null-space bases, and bound or
//! compute `α_k` from the command line.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nsc_core::ensembles::EnsembleKind;
use nsc_core::{BoundMethod, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "nsc",
    version,
    about = "Null space condition verification for compressed sensing"
)]
struct Cli {
    /// Worker threads for subset scoring (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded random sensing matrix A with its metadata sidecar.
    Gen(GenArgs),
    /// Compute an orthonormal null-space basis H of a sensing matrix A.
    Nullspace(NullspaceArgs),
    /// Polynomial-time upper bound on alpha_k.
    Bound(BoundArgs),
    /// Exact alpha_k by sandwiching.
    Exact(ExactArgs),
    /// Exact alpha_k by exhaustive search over all supports.
    Oracle(OracleArgs),
    /// Sweep k = 1..kmax and report the largest certified sparsity.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Bernoulli,
    Fourier,
}

impl From<EnsembleArg> for EnsembleKind {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Gaussian => EnsembleKind::Gaussian,
            EnsembleArg::Bernoulli => EnsembleKind::Bernoulli,
            EnsembleArg::Fourier => EnsembleKind::PartialFourier,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundArg {
    Pick1,
    Pickl,
    Opt,
}

impl From<BoundArg> for BoundMethod {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Pick1 => BoundMethod::Pick1,
            BoundArg::Pickl => BoundMethod::PickL,
            BoundArg::Opt => BoundMethod::PickLOptimized,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Pick1,
    Pickl,
    Opt,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleArg,
    /// Number of measurements (n - m).
    #[arg(long)]
    rows: usize,
    /// Signal length n.
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Options shared by every command that reads a matrix.
#[derive(Debug, Args)]
struct MatrixArgs {
    /// CSV matrix; a `.meta.json` sidecar, when present, says whether it is A or H.
    #[arg(long)]
    matrix: PathBuf,
    /// Treat the input as a null-space basis H regardless of metadata.
    #[arg(long)]
    as_basis: bool,
    #[arg(long, default_value_t = Settings::default().feas_tol)]
    feas_tol: f64,
    #[arg(long, default_value_t = Settings::default().cmp_tol)]
    cmp_tol: f64,
    #[arg(long, default_value_t = Settings::default().basis_tol)]
    basis_tol: f64,
    /// Recompute subset scores instead of using the on-disk cache.
    #[arg(long)]
    no_cache: bool,
}

impl MatrixArgs {
    fn settings(&self) -> Settings {
        Settings {
            feas_tol: self.feas_tol,
            cmp_tol: self.cmp_tol,
            basis_tol: self.basis_tol,
            ..Settings::default()
        }
    }
}

#[derive(Debug, Args)]
struct NullspaceArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = Settings::default().basis_tol)]
    basis_tol: f64,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[command(flatten)]
    input: MatrixArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, value_enum, default_value = "pickl")]
    method: BoundArg,
    /// Report JSON path (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit with status 1 unless the bound is below 1/2.
    #[arg(long)]
    require_certified: bool,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    input: MatrixArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    /// Trace CSV path (step,K,cub,lpub,exact_alpha,gub,glb).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    require_certified: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: MatrixArgs,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    require_certified: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: MatrixArgs,
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit with status 1 unless at least one k is certified.
    #[arg(long)]
    require_certified: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("could not size thread pool: {e}");
        }
    }

    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Nullspace(a) => commands::nullspace(a),
        Command::Bound(a) => commands::bound(a),
        Command::Exact(a) => commands::exact(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::NotCertified(detail)) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": "NotCertified", "message": detail})
            );
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": e.kind(), "message": e.to_string()})
            );
            ExitCode::from(1)
        }
    }
}

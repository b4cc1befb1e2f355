use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

/// Verify secant-set upper limits and null-Lagrangian identities.
#[derive(Debug, Parser)]
#[command(name = "tangentlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for point-cloud CSV files and manifests.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid points per axis (overrides the config).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Upper-limit membership radius (overrides the config).
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Simpson panels for quadratures.
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    /// Emit JSON (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the secant set of a graph for one coefficient vector.
    Secant,
    /// Check that the upper limit of secant sets lies in the tangent set.
    Limsup,
    /// Hausdorff distance between two point-cloud CSV files.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Secant set of the flat function phi(x) for coefficients (1/n, 0[, 0]).
    Counterexample {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Euler-Lagrange residuals along curves.
    ElCheck,
    /// Action integrals along curves.
    Action,
    /// Exactness residuals of a separable Lagrangian.
    Exactness,
    /// Potential of an exact pair (P, Q).
    Potential,
    /// Exactness, EL residuals, actions and velocity dependence in one report.
    Mechanics,
}

fn configure_threads() -> Result<(), commands::Failure> {
    let Ok(value) = std::env::var("TANGENTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            commands::Failure::Config(format!(
                "TANGENTLAB_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::Failure::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| {
        let c = &cli.common;
        match &cli.command {
            Command::Secant => commands::secant(c),
            Command::Limsup => commands::limsup(c),
            Command::Hausdorff { a, b } => commands::hausdorff(c, a, b),
            Command::Counterexample { dim, n } => commands::counterexample(c, *dim, *n),
            Command::ElCheck => commands::el_check(c),
            Command::Action => commands::action(c),
            Command::Exactness => commands::exactness(c),
            Command::Potential => commands::potential(c),
            Command::Mechanics => commands::mechanics(c),
        }
    });
    match result {
        Ok(verified) => ExitCode::from(if verified { 0 } else { 1 }),
        Err(failure) => {
            eprintln!("tangentlab: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

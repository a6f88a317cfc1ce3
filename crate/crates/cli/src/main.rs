//! resvar: Monte Carlo experiments for residual-variance estimation in
//! high-dimensional Gaussian regression.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod csvio;
mod dataset;
mod svg;

/// Exit-code contract: 0 = success / all checks pass, 1 = a check failed,
/// 2 = usage or I/O error.
#[derive(Debug)]
pub enum Failure {
    Check(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Usage(m) => m,
        }
    }
}

impl From<resvar::Error> for Failure {
    fn from(e: resvar::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "resvar", version, about = "Monte Carlo experiments for residual-variance estimation in high-dimensional regression")]
pub struct Cli {
    /// Master seed (defaults to 20240101; never wall-clock).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory for CSV and SVG artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Cap on worker threads; results are identical for any value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML config file; CLI flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Replications per scenario.
    #[arg(long, global = true)]
    pub replications: Option<usize>,

    /// Number of design repetitions (figure1) or independent designs
    /// (moment-check).
    #[arg(long, global = true)]
    pub designs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the error-rate table over the n = p grid.
    Table1 {
        /// Restrict to these n values, comma separated.
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
        /// Restrict to these 1-based column indices, comma separated.
        #[arg(long, value_delimiter = ',')]
        cols: Option<Vec<usize>>,
    },
    /// Design-repetition study: histogram of per-design error rates.
    Figure1,
    /// Print the moment estimate of sigma2 for a dataset file.
    Estimate {
        /// Dataset file: first line `n p`, then n lines of p design entries
        /// followed by the response.
        data: PathBuf,
        /// True noise variance, for the variance-formula printout.
        #[arg(long)]
        sigma2: Option<f64>,
        /// True squared coefficient norm, for the variance-formula printout.
        #[arg(long)]
        beta_norm2: Option<f64>,
    },
    /// Monte Carlo check of the estimator variance formula.
    VarianceCheck {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        beta_norm2: Option<f64>,
    },
    /// Fixed-design deviation probabilities against the bound shape.
    BoundCheck {
        /// Dimension ratio: p = round(c n).
        #[arg(long)]
        c: Option<f64>,
        /// Strictly increasing n grid, comma separated.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        /// Deviation threshold.
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        beta_norm2: Option<f64>,
    },
    /// Monte Carlo check of the Gaussian moment identities.
    MomentCheck {
        /// Coefficient dimension for the default beta.
        #[arg(long)]
        p: Option<usize>,
        /// Squared norm of the default beta.
        #[arg(long)]
        beta_norm2: Option<f64>,
        /// Explicit beta components, overriding --p / --beta-norm2.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        beta: Option<Vec<f64>>,
        #[arg(long)]
        draws: Option<usize>,
        /// Rows per design in the signal-energy variance check.
        #[arg(long)]
        design_rows: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file_cfg = config::load(cli.config.as_deref())?;
    let manifest = config::resolve(&cli, file_cfg);
    match manifest.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(&cli.command, &manifest))
        }
        None => dispatch(&cli.command, &manifest),
    }
}

fn dispatch(command: &Command, manifest: &config::RunManifest) -> Result<(), Failure> {
    match command {
        Command::Table1 { rows, cols } => {
            commands::cmd_table1(manifest, rows.clone(), cols.clone())
        }
        Command::Figure1 => commands::cmd_figure1(manifest),
        Command::Estimate {
            data,
            sigma2,
            beta_norm2,
        } => commands::cmd_estimate(data, *sigma2, *beta_norm2),
        Command::VarianceCheck {
            n,
            p,
            sigma2,
            beta_norm2,
        } => commands::cmd_variance_check(manifest, *n, *p, *sigma2, *beta_norm2),
        Command::BoundCheck {
            c,
            n_grid,
            xi,
            sigma2,
            beta_norm2,
        } => commands::cmd_bound_check(manifest, *c, n_grid.clone(), *xi, *sigma2, *beta_norm2),
        Command::MomentCheck {
            p,
            beta_norm2,
            beta,
            draws,
            design_rows,
        } => commands::cmd_moment_check(
            manifest,
            *p,
            *beta_norm2,
            beta.clone(),
            *draws,
            *design_rows,
        ),
    }
}

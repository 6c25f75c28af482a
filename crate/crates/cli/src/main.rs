//! `lkernel`: verification runs, reports and the self-test suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod cache;
mod commands;
mod output;
mod selftest;

#[derive(Parser, Debug)]
#[command(name = "lkernel", version, about = "Verify the average L-value identity for level-one eigenforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Residual of the vanishing statement for k in {8, 10, 14}.
    VerifyCor2,
    /// All four terms against the spectral (and optionally quadrature) side.
    VerifyTheorem,
    /// Average of L*(f,s) L*(f,s') / <f,f> from the closed form and spectrally.
    Average,
    /// Dual-method checks of the intermediate integrals.
    Oracles,
    /// Built-in invariant suite.
    Selftest,
    /// One CSV row of terms per grid point.
    Table,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Opts {
    /// Weight k.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Re s.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Im s.
    #[arg(long = "s-im", global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s_im: f64,
    /// Re s'.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sp: Option<f64>,
    /// Im s'.
    #[arg(long = "sp-im", global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sp_im: f64,
    /// JSON list of points `{"k":..,"s_re":..,"s_im":..,"sp_re":..,"sp_im":..}`.
    #[arg(long, global = true)]
    pub grid: Option<PathBuf>,
    /// Shells N = ad summed directly before the family tail.
    #[arg(long = "n-max", global = true, default_value_t = 200)]
    pub n_max: u64,
    /// Matrix box for the direct kernel sum.
    #[arg(long = "m-max", global = true, default_value_t = 60)]
    pub m_max: u32,
    /// Pass/fail tolerance (command-specific default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Relative tolerance of the direct-quadrature left-hand side.
    #[arg(long = "quad-tol", global = true, default_value_t = 1e-4)]
    pub quad_tol: f64,
    /// Also evaluate the left-hand side by kernel summation and quadrature.
    #[arg(long, global = true)]
    pub quadrature: bool,
    /// q-expansion coefficients carried by the eigenforms.
    #[arg(long, global = true, default_value_t = 64)]
    pub prec: usize,
    /// Petersson quadrature: truncation height and grid sizes.
    #[arg(long = "y-max", global = true, default_value_t = 12.0)]
    pub y_max: f64,
    #[arg(long, global = true, default_value_t = 32)]
    pub nx: usize,
    #[arg(long, global = true, default_value_t = 24)]
    pub ny: usize,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Cache directory for q-expansions; LKERNEL_CACHE takes precedence.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Exit statuses.
pub mod status {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const INVALID_PARAMS: u8 = 2;
    pub const ACCURACY: u8 = 3;
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(status::FAILURE);
        }
    }
    ExitCode::from(commands::run(&cli))
}

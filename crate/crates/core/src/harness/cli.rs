//! Command-line surface of the `cyclecert` binary.

use std::path::PathBuf;

use clap::Parser;

use super::{Experiment, ExperimentConfig, Format, THREADS_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ASSERT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cyclecert",
    version,
    about = "Sumsets of random cycle types and Galois screening"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub experiment: Experiment,

    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,

    #[arg(long, default_value_t = 4)]
    pub r: usize,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; 0 uses every core.
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    pub threads: usize,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long, default_value_t = crate::perm_model::DEFAULT_EPS)]
    pub eps: f64,

    #[arg(long, default_value_t = 1.5)]
    pub x: f64,

    /// Cutoffs for the fourfold experiment.
    #[arg(long = "L", value_delimiter = ',', default_value = "64")]
    pub cutoffs: Vec<usize>,

    /// Prime sampling range as `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    pub prime_range: Option<(u64, u64)>,

    /// Polynomial as text (`x^16 - x - 1`) or a JSON coefficient array.
    #[arg(long)]
    pub poly: Option<String>,

    /// Exit with status 3 when any row reports a failed check.
    #[arg(long = "assert")]
    pub check: bool,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    Ok((lo, hi))
}

impl Cli {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            experiment: self.experiment,
            n: self.n.clone(),
            r: self.r,
            trials: self.trials,
            seed: self.seed,
            threads: self.threads,
            eps: self.eps,
            x: self.x,
            cutoffs: self.cutoffs.clone(),
            prime_range: self.prime_range,
            poly: self.poly.clone(),
            format: self.format,
        }
    }
}

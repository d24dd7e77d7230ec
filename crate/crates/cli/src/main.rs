mod commands;
mod error;
mod model;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyra::{Backend, SegmentWeighting};

use crate::table::CsvOptions;

#[derive(Parser, Debug)]
#[command(name = "polyra", version, about = "Fit, abstract and query swarms of conditional polytopes")]
pub struct Cli {
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, env = "POLYRA_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Treat the first CSV row as data even if it is not numeric.
    #[arg(long, global = true)]
    pub no_header: bool,

    /// CSV field delimiter (single byte, `\t` for tabs).
    #[arg(long, global = true, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn csv(&self) -> CsvOptions {
        CsvOptions { header: self.no_header.then_some(false), delimiter: self.delimiter }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a swarm to the points of a CSV file.
    Fit {
        input: PathBuf,
        /// Model file to write; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Membership (0/1) per input row, or over a 2D grid.
    Predict {
        model: PathBuf,
        /// Points to classify. Not needed with --grid.
        input: Option<PathBuf>,
        /// Emit an N x N membership grid instead of reading points.
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
        /// Grid box as `lo0,hi0,lo1,hi1`, or `auto` for the model bounds plus 10%.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        bounds: String,
        /// Shorthand for `--grid 200 --bounds auto`.
        #[arg(long, conflicts_with = "grid")]
        render: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Membership and anomaly scores (1 - normality) per input row.
    Score {
        model: PathBuf,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a model's logic into a small union of polytopes.
    Abstract {
        model: PathBuf,
        /// Training points the model was fitted on.
        #[arg(long)]
        train: PathBuf,
        #[command(flatten)]
        abs: AbstractArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample member points with a hit-and-run walk.
    Generate {
        model: PathBuf,
        #[arg(short = 'n', long = "samples", default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        burn_in: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `inverse` or `proportional` segment weights.
        #[arg(long, default_value = "inverse")]
        weighting: SegmentWeighting,
        /// Start point as comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Member intervals of one free coordinate with all others fixed.
    Range {
        model: PathBuf,
        /// Fixed coordinates as `index=value`, repeated or comma-separated.
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        fix: Vec<String>,
    },
    /// Cluster points by abstracting a swarm fitted to them.
    Cluster {
        input: PathBuf,
        /// Use this swarm instead of fitting one.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        abs: AbstractArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the clusters as a dnf model file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write `row,clusters` for every input row.
        #[arg(long)]
        assignments: Option<PathBuf>,
    },
    /// Monte Carlo volumetric intersection over union.
    Eval {
        model: PathBuf,
        /// Reference shape: `box:lo0,hi0,...`, `diamond:cx,cy,r`, `disc:cx,cy,r` or `annulus:cx,cy,inner,outer`.
        #[arg(long, group = "reference")]
        viou: Option<String>,
        /// Second model file to compare with.
        #[arg(long, group = "reference")]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling box as `lo0,hi0,lo1,hi1,...`; defaults to both shapes' bounds.
        #[arg(long, allow_hyphen_values = true)]
        bounds: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Accepted draws; each adds one or two base shapes.
    #[arg(long, default_value_t = 1000)]
    pub n_models: usize,
    /// Constraints per condition.
    #[arg(long, default_value_t = 2)]
    pub adim: usize,
    /// Consequent directions per base shape.
    #[arg(long, default_value_t = 2)]
    pub bdim: usize,
    /// Fewest training points a condition must hold.
    #[arg(long, default_value_t = 0)]
    pub minpoi: usize,
    /// Relative widening of each consequent range.
    #[arg(long, default_value_t = 0.0)]
    pub extend: f64,
    /// Tail fraction trimmed before taking consequent extremes.
    #[arg(long, default_value_t = 0.0)]
    pub quantile: f64,
    /// Fraction of points left out of each draw.
    #[arg(long, default_value_t = 0.0)]
    pub subsample: f64,
    /// Rejected draws allowed per requested draw.
    #[arg(long, default_value_t = 100)]
    pub max_reject_factor: u64,
}

#[derive(Args, Debug, Clone)]
pub struct AbstractArgs {
    /// Relative volume a merge may add.
    #[arg(long, default_value_t = 0.05)]
    pub delta_v: f64,
    /// `sampling` (training points) or `lp`.
    #[arg(long, default_value = "sampling")]
    pub backend: Backend,
    #[arg(long, default_value_t = 10_000)]
    pub feasibility_samples: usize,
    #[arg(long, default_value_t = 10_000)]
    pub volume_samples: usize,
    /// Margin that makes negated constraints strict.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub term_ceiling: usize,
    #[arg(long, default_value_t = 50)]
    pub max_passes: usize,
    /// Decision box as `lo0,hi0,lo1,hi1,...`; defaults to the data bounds plus 10%.
    #[arg(long = "region", allow_hyphen_values = true)]
    pub region: Option<String>,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

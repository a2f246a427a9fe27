//! `lfam` — enumerate the cubic/quartic character families, populate the
//! central-value cache, and run the moment experiments.
//!
//! Exit codes: 0 success, 1 computational failure, 2 usage error.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{cmd_constants, cmd_enumerate, cmd_experiment, cmd_lvalues};
use commands::{Experiment, MethodChoice, RunConfig};
use lfam::ring::Family;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Cubic,
    Quartic,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Cubic => Family::Cubic,
            FamilyArg::Quartic => Family::Quartic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Afe,
    Direct,
    Both,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> MethodChoice {
        match m {
            MethodArg::Afe => MethodChoice::Afe,
            MethodArg::Direct => MethodChoice::Direct,
            MethodArg::Both => MethodChoice::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    #[value(name = "first-moment")]
    FirstMoment,
    Moments,
    Polya,
    Holder,
    Logbound,
    Nonvanishing,
    Primesum,
    Constants,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Experiment {
        match e {
            ExperimentArg::FirstMoment => Experiment::FirstMoment,
            ExperimentArg::Moments => Experiment::Moments,
            ExperimentArg::Polya => Experiment::Polya,
            ExperimentArg::Holder => Experiment::Holder,
            ExperimentArg::Logbound => Experiment::Logbound,
            ExperimentArg::Nonvanishing => Experiment::Nonvanishing,
            ExperimentArg::Primesum => Experiment::Primesum,
            ExperimentArg::Constants => Experiment::Constants,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lfam",
    version,
    about = "Cubic and quartic Dirichlet character families: central L-values and moment experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a family up to a conductor bound and write the member CSV.
    Enumerate {
        #[arg(long)]
        family: FamilyArg,
        /// Conductor bound X.
        #[arg(long)]
        xmax: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute central values for every member up to --xmax into the cache.
    /// Present rows are skipped, so interrupted runs resume cleanly.
    Lvalues {
        #[arg(long)]
        family: FamilyArg,
        #[arg(long)]
        xmax: u64,
        /// Cache CSV path.
        #[arg(long, default_value = "lvalues.csv")]
        cache: PathBuf,
        /// afe, direct (oracle, capped conductor), or both (prints deltas).
        #[arg(long, value_enum, default_value_t = MethodArg::Afe)]
        method: MethodArg,
        /// Worker threads (0 = all cores). Results are thread-count invariant.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Run one experiment over an X sweep and write JSON + CSV reports.
    Experiment {
        #[arg(value_enum)]
        which: ExperimentArg,
        #[arg(long)]
        family: FamilyArg,
        /// Single X (alternative to --xsweep).
        #[arg(long)]
        xmax: Option<u64>,
        /// Comma-separated X sweep, e.g. 1000,10000,50000.
        #[arg(long, value_delimiter = ',')]
        xsweep: Vec<u64>,
        /// Moment exponents k for moments/holder.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
        k: Vec<f64>,
        /// Twists l for first-moment.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u64])]
        twist: Vec<u64>,
        /// Upper arguments c for polya.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u64])]
        c: Vec<u64>,
        #[arg(long, default_value = "lvalues.csv")]
        cache: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Slack constant standing in for the unspecified O(.) of the
        /// logbound diagnostic.
        #[arg(long, default_value_t = 2.0)]
        slack: f64,
    },
    /// Print the family constants as JSON.
    Constants {
        #[arg(long)]
        family: FamilyArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate { family, xmax, out } => {
            cmd_enumerate(family.into(), xmax, &out).map(|_| ())
        }
        Command::Lvalues { family, xmax, cache, method, threads } => {
            cmd_lvalues(family.into(), xmax, &cache, method.into(), threads)
        }
        Command::Experiment {
            which,
            family,
            xmax,
            xsweep,
            k,
            twist,
            c,
            cache,
            threads,
            out,
            slack,
        } => {
            let xs = if xsweep.is_empty() {
                xmax.into_iter().collect()
            } else {
                xsweep
            };
            let config = RunConfig {
                family: family.into(),
                xs,
                ks: k,
                twists: twist,
                cs: c,
                cache,
                out,
                threads,
                slack,
            };
            cmd_experiment(which.into(), &config).map(|_| ())
        }
        Command::Constants { family } => cmd_constants(family.into()).map(|json| {
            println!("{json}");
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

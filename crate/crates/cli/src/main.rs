//! `kakeya-lab`: construct measures, estimate dimensions, evaluate bounds,
//! run the verification suite and plot bound curves.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kakeya_core::{Error, ErrorKind};

/// Exit statuses.
const EXIT_CONFIG: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_VERIFY_FAIL: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "kakeya-lab",
    version,
    about = "Fourier dimension laboratory for Kakeya- and Furstenberg-type sets"
)]
struct Cli {
    /// Worker threads for the numerical kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a measure from a JSON construction spec.
    Construct {
        #[arg(long)]
        spec: PathBuf,
        /// Measure file; metadata goes to `<out>.json`.
        #[arg(long)]
        out: PathBuf,
        /// Required for stochastic constructions.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fourier, Frostman and box-counting estimates of a measure file.
    Estimate(EstimateArgs),
    /// Closed-form bounds at a point, along a sweep, or on a grid (CSV).
    Bounds {
        #[arg(long)]
        regime: String,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, conflicts_with_all = ["s", "t", "fixed_t"])]
        fixed_s: Option<f64>,
        #[arg(long, conflicts_with_all = ["s", "t"])]
        fixed_t: Option<f64>,
        /// Samples per axis for grids and sweeps.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a manifest of experiments (default: the built-in suite).
    Verify {
        /// JSON manifest `{"experiments": [...]}`.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Write the JSON verdicts here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print JSON instead of the text summary.
        #[arg(long)]
        json: bool,
    },
    /// Bound curves as SVG plus CSV.
    Plot {
        #[arg(long, required_unless_present = "all")]
        regime: Option<String>,
        #[arg(long, conflicts_with = "fixed_t")]
        fixed_s: Option<f64>,
        #[arg(long)]
        fixed_t: Option<f64>,
        /// Every figure panel; `--out` is then a directory.
        #[arg(long, conflicts_with_all = ["regime", "fixed_s", "fixed_t"])]
        all: bool,
        #[arg(long, default_value_t = kakeya_core::bounds::MAX_PLOT_SAMPLES)]
        samples: usize,
        /// SVG path (CSV is written next to it), or a directory with `--all`.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplingArg {
    Dense,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaseArg {
    Dyadic,
    Triadic,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    measure: PathBuf,
    /// First annulus radius (default 4 on the line, 1 in the plane).
    #[arg(long)]
    r0: Option<f64>,
    /// Number of annulus doublings (default: up to 8, within the atomization cap).
    #[arg(long)]
    annuli: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value = "dense")]
    sampling: SamplingArg,
    /// Seed of the frequency jitter.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    scale_min: Option<f64>,
    #[arg(long)]
    scale_max: Option<f64>,
    #[arg(long, value_enum, default_value = "dyadic")]
    base: BaseArg,
    /// Write the Fourier decay profile as CSV.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Precondition => EXIT_PRECONDITION,
        ErrorKind::Config | ErrorKind::Io => EXIT_CONFIG,
    }
}

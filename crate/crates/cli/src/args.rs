use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Displacement sensing with two-photon interference: Fisher information,
/// event simulation and maximum-likelihood estimation.
///
/// Every option can also be set in a `--config` file as `key=value` (long
/// flag name without dashes); command-line flags take precedence.
///
/// Exit codes: 0 success, 2 invalid configuration, 3 runtime or numeric
/// failure, 4 I/O or malformed input file.
#[derive(Debug, Parser)]
#[command(name = "homsense", version)]
pub struct Cli {
    /// Flat key=value file with default values for any flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate P(Δk, A), P(Δk, B) and the envelope C(Δk) = P_A + P_B
    #[command(allow_negative_numbers = true)]
    Probability(ProbabilityArgs),
    /// Fisher-information scan over Δx and per-Δk contribution over Δk
    #[command(allow_negative_numbers = true)]
    Fisher(FisherArgs),
    /// Draw detection events and write them as CSV
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Maximum-likelihood estimate of |Δx| from an events CSV
    #[command(allow_negative_numbers = true)]
    Estimate(EstimateArgs),
    /// Repeated simulate-and-estimate runs, optionally sweeping the sample size
    #[command(allow_negative_numbers = true)]
    Trials(TrialsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Resolving,
    Bucket,
    SingleCamera,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Distinguishability ν in [0, 1]; `fisher` accepts a comma-separated list [default: 1]
    #[arg(long, value_delimiter = ',')]
    pub nu: Vec<f64>,

    /// Transverse displacement Δx (nm in physical mode) [default: 4/σ_k]
    #[arg(long)]
    pub dx: Option<f64>,

    /// Momentum spread σ_k of a Gaussian wavepacket [default: 1]
    #[arg(long)]
    pub sigma_k: Option<f64>,

    /// Tabulated momentum density |φ(k)|² as CSV with columns k,density
    #[arg(long, value_name = "FILE")]
    pub dist_csv: Option<PathBuf>,

    /// Position spread σ_x in nm; switches to physical units with σ_k = 1/(2σ_x)
    #[arg(long)]
    pub sigma_x_nm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    /// Detector arrangement [default: resolving]
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,

    /// Camera momentum pitch δk [default: σ_k/20]
    #[arg(long)]
    pub pixel: Option<f64>,

    /// Sensing range in Δk as LO,HI [default: ±6√2·σ_k]
    #[arg(long, allow_hyphen_values = true, value_name = "LO,HI")]
    pub range: Option<String>,

    /// Record Δk at pixel centres and use the binned likelihood
    #[arg(long)]
    pub snap: bool,

    /// Wavenumber k₀ in 1/nm; with --distance and --pixel-size sets the pitch
    #[arg(long)]
    pub k0: Option<f64>,

    /// Source-to-camera distance d in nm
    #[arg(long)]
    pub distance: Option<f64>,

    /// Camera pixel size δy in nm
    #[arg(long)]
    pub pixel_size: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Lower end of the |Δx| search interval [default: 0]
    #[arg(long)]
    pub search_lo: Option<f64>,

    /// Upper end of the |Δx| search interval [default: 20/σ_k]
    #[arg(long)]
    pub search_hi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent or `-`
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Output format [default: csv, json for estimate]
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Random seed; accepted by every command, used where sampling happens [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DkSweep {
    /// Lowest Δk of the sweep [default: −6√2·σ_k]
    #[arg(long, allow_hyphen_values = true)]
    pub dk_min: Option<f64>,

    /// Highest Δk of the sweep [default: 6√2·σ_k]
    #[arg(long)]
    pub dk_max: Option<f64>,

    /// Number of Δk points [default: 241]
    #[arg(long)]
    pub dk_steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProbabilityArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub sweep: DkSweep,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also write a gnuplot script next to the output file
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    #[command(flatten)]
    pub scene: SceneArgs,

    /// Smallest Δx of the scan [default: 0]
    #[arg(long)]
    pub dx_min: Option<f64>,

    /// Largest Δx of the scan [default: 6/σ_k]
    #[arg(long)]
    pub dx_max: Option<f64>,

    /// Number of Δx points [default: 121]
    #[arg(long)]
    pub dx_steps: Option<usize>,

    #[command(flatten)]
    pub sweep: DkSweep,

    /// Output directory for fisher_scan and fi_contrib [default: .]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Accepted for uniformity; the scan is deterministic
    #[arg(long)]
    pub seed: Option<u64>,

    /// Also write gnuplot scripts for both tables
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,

    /// Number of photon pairs [default: 3000]
    #[arg(long)]
    pub n: Option<usize>,

    /// Events CSV destination; standard output when absent or `-`
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Random seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Events CSV written by `simulate`
    #[arg(long, value_name = "FILE")]
    pub events: Option<PathBuf>,

    /// Tabulated momentum density the events were drawn from, if not Gaussian
    #[arg(long, value_name = "FILE")]
    pub dist_csv: Option<PathBuf>,

    /// Assume this ν instead of the one recorded in the events file
    #[arg(long)]
    pub nu: Option<f64>,

    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TrialsArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[command(flatten)]
    pub search: SearchArgs,

    /// Pairs per trial; a comma-separated list sweeps the sample size [default: 3000]
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,

    /// Trials per sample size [default: 1000]
    #[arg(long)]
    pub trials: Option<usize>,

    /// Per-trial CSV (trial_index, estimate, loglik)
    #[arg(long, value_name = "FILE")]
    pub records: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,

    /// Also write a gnuplot script next to the output file
    #[arg(long)]
    pub gnuplot: bool,
}

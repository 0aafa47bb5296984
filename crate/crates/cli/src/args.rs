use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarforge::dataset::{ImageFormat, SceneKind};
use polarforge::StageConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "polarforge", version, about = "Simulate, reconstruct and score color-polarization filter array captures")]
pub struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "POLARFORGE_JOBS", default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic scenes with ground truth and CPFA raws.
    Simulate(SimulateArgs),
    /// Demosaic (and optionally super-resolve) a CPFA raw.
    Reconstruct(ReconstructArgs),
    /// Score reconstructions against their ground truth.
    Eval(EvalArgs),
    /// Run one of the scene-suite experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SceneArgs {
    /// Base seed; batch members use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Side length of the full-resolution scene in pixels.
    #[arg(long, default_value_t = 64)]
    pub size: usize,

    /// Scene kind; cycles through all kinds by seed when omitted.
    #[arg(long)]
    pub kind: Option<SceneKind>,

    /// Gaussian noise sigma(s) added to the raw, cycled by seed.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub noise: Vec<f64>,

    /// Degree-of-polarization range as `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_value = "0.05,0.6")]
    pub p_range: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scene: SceneArgs,

    /// Super-resolution factor exponent: the raw is `size / 2^rounds` wide.
    #[arg(long, default_value_t = 1)]
    pub rounds: u32,

    #[arg(long, default_value_t = 1)]
    pub count: usize,

    /// Pattern JSON (16 "angle:channel" cells); the default layout otherwise.
    #[arg(long)]
    pub pattern: Option<PathBuf>,

    #[arg(long, default_value = "pfm")]
    pub format: ImageFormat,

    /// Output directory; batches get one `scene_<seed>` subdirectory each.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pidsr,
    Bilinear,
    Sequential,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StageArgs {
    #[arg(long, default_value_t = 1)]
    pub median_radius: usize,

    /// Also median-filter s0 in the coherence stage.
    #[arg(long)]
    pub denoise: bool,

    /// Unsharp boost of s0 in the enhancement stage.
    #[arg(long)]
    pub sharpen: bool,
}

impl StageArgs {
    pub fn config(&self, rounds: u32) -> StageConfig {
        StageConfig {
            f_median_radius: self.median_radius,
            f_denoise: self.denoise,
            g_sharpen: self.sharpen,
            rounds,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconstructArgs {
    /// Sample manifest written by `simulate`.
    #[arg(long, conflicts_with = "raw", required_unless_present = "raw")]
    pub manifest: Option<PathBuf>,

    /// Standalone raw file (pfm or png).
    #[arg(long)]
    pub raw: Option<PathBuf>,

    /// Pattern JSON for a standalone raw.
    #[arg(long, requires = "raw")]
    pub pattern: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Method::Pidsr)]
    pub method: Method,

    /// Super-resolution rounds; defaults to the manifest's, or 0.
    #[arg(long)]
    pub rounds: Option<u32>,

    #[command(flatten)]
    #[serde(flatten)]
    pub stage: StageArgs,

    #[arg(long, default_value = "pfm")]
    pub format: ImageFormat,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    /// Reconstruction directory, or a bare stack directory with --manifest.
    #[arg(long, required = true)]
    pub pred: Vec<PathBuf>,

    /// Ground-truth manifest; only valid with a single --pred.
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Scale to score, e.g. `1x` or `2x`; the largest available otherwise.
    #[arg(long)]
    pub scale: Option<String>,

    /// Report path; stdout otherwise.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SuiteArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scene: SceneArgs,

    #[arg(long, default_value_t = 20)]
    pub count: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub stage: StageArgs,

    /// JSON report path; stdout otherwise.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Optional per-scene CSV table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub suite: SuiteArgs,

    #[arg(long, default_value_t = 1)]
    pub rounds: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub suite: SuiteArgs,

    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Error rates of S0, DoP and AoP after bilinear demosaicing.
    ErrGap(SuiteArgs),
    /// Super-resolution fed ground-truth vs demosaiced low-resolution input.
    InputQuality(RoundsArgs),
    /// Demosaicing error rates of one scene at increasing resolution.
    ErrVsRes(ResArgs),
    /// Joint pipeline against demosaic-then-upsample.
    Complementarity(RoundsArgs),
}

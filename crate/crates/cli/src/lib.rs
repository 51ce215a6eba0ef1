//! Command-line workbench for the QLSTM patch GAN.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod checkpoint;
pub mod commands;
pub mod idx;
pub mod model;
pub mod pgm;
pub mod settings;

pub use settings::UsageError;

const DATA_HELP: &str = "\
Datasets are uncompressed IDX files. --data DIR uses the first pair found
among train-images-idx3-ubyte / train-labels-idx1-ubyte,
images-idx3-ubyte / labels-idx1-ubyte and t10k-images-idx3-ubyte /
t10k-labels-idx1-ubyte. --images and --labels name the files directly.";

#[derive(Debug, Parser)]
#[command(name = "qgan", version, about = "Quantum LSTM patch GAN: train, generate, score and report")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a generator and discriminator, writing checkpoints, metrics and sample grids.
    #[command(after_help = DATA_HELP)]
    Train(Box<TrainArgs>),
    /// Write images sampled from a checkpoint as PGM files.
    Generate(GenerateArgs),
    /// Fréchet distance between real and generated image sets.
    #[command(after_help = DATA_HELP)]
    Fid(FidArgs),
    /// Fit PCA to real images and decode random low-dimensional scores.
    #[command(after_help = DATA_HELP)]
    PcaStudy(PcaStudyArgs),
    /// Qubit and gate totals for a generator architecture.
    Resources(ResourcesArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Directory holding an IDX image/label pair.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// IDX image file (with --labels).
    #[arg(long, requires = "labels", conflicts_with = "data")]
    pub images: Option<PathBuf>,
    /// IDX label file (with --images).
    #[arg(long, requires = "images", conflicts_with = "data")]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// key = value settings file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Continue from a checkpoint; settings it carries apply unless overridden.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// lstm-qgan or patchgan.
    #[arg(long)]
    pub arch: Option<String>,
    /// 8×8 images (24×24 centre crop, 3×3 pooling) for quick runs.
    #[arg(long)]
    pub toy: bool,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Stacked QLSTM layers.
    #[arg(long)]
    pub layers: Option<usize>,
    /// probabilities or pauli-z.
    #[arg(long)]
    pub hidden: Option<String>,
    /// Patches per image (lstm-qgan).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Pixels per sub-generator patch (patchgan).
    #[arg(long)]
    pub patch_pixels: Option<usize>,
    /// bce or wgan-gp.
    #[arg(long)]
    pub loss: Option<String>,
    /// Gradient-penalty weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Total epochs, counting any already in the resumed checkpoint.
    #[arg(long)]
    pub epochs: Option<u64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Discriminator updates per generator update.
    #[arg(long)]
    pub critic_steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use only the first N images (after --digit).
    #[arg(long)]
    pub limit: Option<usize>,
    /// Train on a single class.
    #[arg(long)]
    pub digit: Option<u8>,
    /// Checkpoint and sample-grid interval in epochs.
    #[arg(long)]
    pub save_every: Option<u64>,
    /// Images in each sample grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write 0 for wall_seconds so repeated runs give identical CSVs.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write all images as one grid with this many columns.
    #[arg(long)]
    pub grid_cols: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FidArgs {
    /// Real images: a PGM directory.
    #[arg(long, conflicts_with_all = ["data", "images"])]
    pub real: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
    /// Generated images: a PGM directory or a checkpoint file.
    #[arg(long)]
    pub generated: PathBuf,
    /// Images drawn from each side.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// raw or pca.
    #[arg(long, default_value = "raw")]
    pub features: String,
    /// Components kept by the pca feature map.
    #[arg(long, default_value_t = qgan_core::eval::DEFAULT_PCA_FEATURES)]
    pub pca_k: usize,
    /// Apply the 8×8 preprocessing to an IDX dataset.
    #[arg(long)]
    pub toy: bool,
    /// Score each digit separately. Directories are split into
    /// subdirectories 0–9 and paths may contain `{digit}`.
    #[arg(long)]
    pub per_class: bool,
    /// Append result rows to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PcaStudyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Images used to fit the model.
    #[arg(long, default_value_t = 5000)]
    pub n_fit: usize,
    /// Images decoded from random scores.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ResourcesArgs {
    /// lstm-qgan, patchgan or all.
    #[arg(default_value = "all")]
    pub arch: String,
    /// Also write the CSV table to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Train(a) => commands::train::run(&a).map(|_| ()),
        Command::Generate(a) => commands::generate::run(&a),
        Command::Fid(a) => commands::fid::run(&a).map(|_| ()),
        Command::PcaStudy(a) => commands::pca_study::run(&a).map(|_| ()),
        Command::Resources(a) => commands::resources::run(&a),
    }
}

/// Exit status for an error returned by [`run`]: 2 for usage problems,
/// 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.downcast_ref::<UsageError>().is_some()) {
        2
    } else {
        1
    }
}

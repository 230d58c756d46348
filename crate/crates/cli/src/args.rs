use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fresh_core::experiments::{DEFAULT_BATCH_SIZE, DEFAULT_LOG_EVERY, DEFAULT_STEPS};
use fresh_core::fresh::{DEFAULT_REPEATS, DEFAULT_RESOLUTION, DEFAULT_SPECTRUM_SIZE};
use fresh_core::{Architecture, EmbeddingConfig, ModelKind};

#[derive(Debug, Parser)]
#[command(name = "fresh", version, about = "Pick the embedding frequency of a coordinate MLP by matching spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every candidate on an untrained model and pick the closest spectrum
    #[command(args_override_self = true)]
    Select(SelectArgs),
    /// Fit one configuration to an image
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Train every candidate of a grid and compare against the selection
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Write spectra, residual ratios and embedding magnitudes as CSV
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Siren,
    Fourier,
    Finer,
    FinerK0,
}

impl From<ModelChoice> for ModelKind {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::Siren => ModelKind::Siren,
            ModelChoice::Fourier => ModelKind::Fourier,
            ModelChoice::Finer => ModelKind::Finer,
            ModelChoice::FinerK0 => ModelKind::FinerK0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// File of `key = value` lines using the long flag names; flags on the
    /// command line take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random draw
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "siren")]
    pub model: ModelChoice,
    /// Siren embedding frequency
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Fourier feature standard deviation
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Finer frequency; also held fixed when sweeping Finer's k [default: 30]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Finer bias range
    #[arg(long)]
    pub k: Option<f64>,
    /// Units per layer
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    /// Hidden layers after the embedding
    #[arg(long, default_value_t = 3)]
    pub hidden_layers: usize,
    /// Frequency factor of sine hidden layers
    #[arg(long, default_value_t = 30.0)]
    pub hidden_omega: f64,
}

impl ModelArgs {
    pub fn kind(&self) -> ModelKind {
        self.model.into()
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            hidden_layers: self.hidden_layers,
            width: self.width,
            channels: 3,
            hidden_omega: self.hidden_omega,
        }
    }

    /// Fixed Finer frequency used when sweeping `k`.
    pub fn finer_omega(&self) -> f64 {
        self.omega.unwrap_or(30.0)
    }

    /// The explicit configuration, falling back to each model's baseline.
    pub fn explicit_config(&self) -> EmbeddingConfig {
        let base = self.kind().baseline();
        match base {
            EmbeddingConfig::Siren { omega0 } => EmbeddingConfig::Siren {
                omega0: self.omega0.unwrap_or(omega0),
            },
            EmbeddingConfig::Fourier { sigma } => EmbeddingConfig::Fourier {
                sigma: self.sigma.unwrap_or(sigma),
            },
            EmbeddingConfig::Finer { omega, k } => EmbeddingConfig::Finer {
                omega: self.omega.unwrap_or(omega),
                k: if self.model == ModelChoice::FinerK0 { 0.0 } else { self.k.unwrap_or(k) },
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelectionArgs {
    /// Candidate values `start:stop:step` or `a,b,c`; defaults: siren 10:200:10,
    /// fourier 1:20:1, finer k 0:3:0.1, finer-k0 omega 10:200:10
    #[arg(long)]
    pub grid: Option<String>,
    /// Spectrum entries compared
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_SIZE)]
    pub n: usize,
    /// Untrained models averaged per candidate
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    /// Side of the square grid used for renders and spectra
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Worker threads for candidate scoring and sweeps
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TrainingArgs {
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Adam learning rate [default: 1e-4 for siren/finer, 1e-3 for fourier]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Pixels per step; larger images train on random batches of this size
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    #[arg(long, default_value_t = DEFAULT_LOG_EVERY)]
    pub log_every: usize,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Target image (8-bit PNG)
    #[arg(long)]
    pub image: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Run the selection first and train its choice
    #[arg(long)]
    pub fresh: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Image whose spectrum is written; also the target for residuals
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Trained model; without it magnitudes come from an untrained model
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Second model for the residual ratio `checkpoint / baseline`
    #[arg(long, requires = "checkpoint")]
    pub baseline: Option<PathBuf>,
    /// Spectrum entries in the residual ratio
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_SIZE)]
    pub n: usize,
    /// Side used for non-square images
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Bins of the magnitude histogram
    #[arg(long, default_value_t = 32)]
    pub bins: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

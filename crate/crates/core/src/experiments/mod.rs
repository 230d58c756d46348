//! Training, metrics, sweeps and analysis used to evaluate selections.

mod metrics;
mod residual;
mod sweep;
mod synth;
mod train;

pub use metrics::{mse, psnr, psnr_from_mse, ssim, PSNR_CAP};
pub use residual::{residual_spectrum_ratio, write_ratio_csv};
pub use sweep::{grid_search, grid_search_runs, SweepEntry, SweepReport};
pub use synth::synth_lowfreq;
pub use train::{default_lr, train_image, LogEntry, TrainConfig, TrainReport, DEFAULT_BATCH_SIZE, DEFAULT_LOG_EVERY, DEFAULT_STEPS};

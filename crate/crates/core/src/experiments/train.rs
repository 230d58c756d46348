use std::io::Write;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{mse, psnr_from_mse, ssim};
use crate::error::{Error, Result};
use crate::image_io::{make_coord_grid, Image};
use crate::inr::{adam_step, coords_to_array, init_model, loss_and_grads, AdamConfig, AdamState, Architecture, EmbeddingConfig, Family, InrModel};

pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_LOG_EVERY: usize = 100;
/// Pixels per step above which training switches to random mini-batches.
pub const DEFAULT_BATCH_SIZE: usize = 1 << 18;

/// Customary Adam learning rate of each family.
pub fn default_lr(config: &EmbeddingConfig) -> f64 {
    match config.family() {
        Family::Siren | Family::Finer => 1e-4,
        Family::Fourier => 1e-3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub steps: usize,
    pub log_every: usize,
    /// Overrides [`default_lr`] when set.
    pub lr: Option<f64>,
    pub batch_size: usize,
    pub seed: u64,
    /// Layer sizes; `channels` is taken from the image.
    pub arch: Architecture,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            log_every: DEFAULT_LOG_EVERY,
            lr: None,
            batch_size: DEFAULT_BATCH_SIZE,
            seed: 0,
            arch: Architecture::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub step: usize,
    pub mse: f64,
    pub psnr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: EmbeddingConfig,
    pub seed: u64,
    pub lr: f64,
    pub log: Vec<LogEntry>,
    /// `None` when the image is smaller than the SSIM window.
    pub final_ssim: Option<f64>,
    pub wall_seconds: f64,
}

impl TrainReport {
    pub fn final_psnr(&self) -> f64 {
        self.log.last().map_or(f64::NAN, |e| e.psnr)
    }

    pub fn final_mse(&self) -> f64 {
        self.log.last().map_or(f64::NAN, |e| e.mse)
    }

    /// `step,mse,psnr`
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "step,mse,psnr")?;
        for e in &self.log {
            writeln!(out, "{},{},{}", e.step, e.mse, e.psnr)?;
        }
        Ok(())
    }
}

/// Training inputs laid out as `P x 2` coordinates and `P x C` targets.
fn training_arrays(image: &Image) -> (Array2<f32>, Array2<f32>) {
    let grid = make_coord_grid(image.height(), image.width());
    let coords = coords_to_array::<f32>(grid.coords());
    let plane = image.pixel_count();
    let targets = Array2::from_shape_fn((plane, image.channels()), |(p, c)| image.data()[c * plane + p] as f32);
    (coords, targets)
}

fn gather(rows: &Array2<f32>, idx: &[usize]) -> Array2<f32> {
    Array2::from_shape_fn((idx.len(), rows.ncols()), |(i, j)| rows[[idx[i], j]])
}

/// Fits a freshly initialized model to `image` with Adam on the MSE.
///
/// Each step uses every pixel when the image has at most `batch_size`
/// pixels and a uniformly drawn batch otherwise. MSE and PSNR of the raw
/// render against the whole image are logged every `log_every` steps and
/// after the last step.
pub fn train_image(config: EmbeddingConfig, image: &Image, train: &TrainConfig) -> Result<(InrModel<f32>, TrainReport)> {
    if train.steps == 0 || train.log_every == 0 || train.batch_size == 0 {
        return Err(Error::InvalidArgument(
            "steps, log_every and batch_size must be positive".into(),
        ));
    }
    if image.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("image has non-finite samples".into()));
    }
    let lr = train.lr.unwrap_or_else(|| default_lr(&config));
    if !(lr.is_finite() && lr > 0.0) {
        return Err(Error::InvalidArgument(format!("learning rate must be positive, got {lr}")));
    }
    let started = Instant::now();
    let arch = train.arch.with_channels(image.channels());
    let mut model = init_model::<f32>(config, arch, train.seed)?;
    let mut adam = AdamState::new(&model, AdamConfig::with_lr(lr));
    let (coords, targets) = training_arrays(image);
    let grid = make_coord_grid(image.height(), image.width());
    let pixels = image.pixel_count();
    let mut batch_rng = ChaCha8Rng::seed_from_u64(train.seed);
    batch_rng.set_stream(1);
    let mut idx = vec![0usize; train.batch_size.min(pixels)];
    let mut log = Vec::new();

    for step in 1..=train.steps {
        let (loss, grads) = if pixels <= train.batch_size {
            loss_and_grads(&model, coords.view(), targets.view())?
        } else {
            idx.iter_mut().for_each(|i| *i = batch_rng.random_range(0..pixels));
            let (x, y) = (gather(&coords, &idx), gather(&targets, &idx));
            loss_and_grads(&model, x.view(), y.view())?
        };
        if !loss.is_finite() {
            return Err(Error::Diverged {
                step,
                config: config.to_string(),
                loss,
            });
        }
        adam_step(&mut model, &grads, &mut adam)?;
        if step % train.log_every == 0 || step == train.steps {
            let err = mse(&model.render(&grid), image)?;
            if !err.is_finite() {
                return Err(Error::Diverged {
                    step,
                    config: config.to_string(),
                    loss: err,
                });
            }
            log::debug!("{config} step {step}: mse {err:.3e}");
            log.push(LogEntry {
                step,
                mse: err,
                psnr: psnr_from_mse(err),
            });
        }
    }
    let final_ssim = ssim(&model.render(&grid), image).ok();
    let report = TrainReport {
        config,
        seed: train.seed,
        lr,
        log,
        final_ssim,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::train::{train_image, TrainConfig, TrainReport};
use crate::error::{Error, Result};
use crate::fresh::CandidateGrid;
use crate::image_io::Image;
use crate::inr::{EmbeddingConfig, InrModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub config: EmbeddingConfig,
    pub param: f64,
    pub report: Option<TrainReport>,
    /// Why training stopped early, for divergent candidates.
    pub failure: Option<String>,
    #[serde(skip)]
    pub model: Option<InrModel<f32>>,
}

impl SweepEntry {
    pub fn final_psnr(&self) -> Option<f64> {
        self.report.as_ref().map(TrainReport::final_psnr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Index of the highest final PSNR; `None` when every candidate failed.
    pub best: Option<usize>,
}

impl SweepReport {
    pub fn best_entry(&self) -> Option<&SweepEntry> {
        self.best.map(|i| &self.entries[i])
    }

    pub fn entry_for(&self, config: &EmbeddingConfig) -> Option<&SweepEntry> {
        self.entries.iter().find(|e| &e.config == config)
    }

    /// `param,final_psnr,final_ssim,best`; failed candidates report `NaN`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "param,final_psnr,final_ssim,best")?;
        for (i, e) in self.entries.iter().enumerate() {
            let (p, s) = match &e.report {
                Some(r) => (r.final_psnr(), r.final_ssim.unwrap_or(f64::NAN)),
                None => (f64::NAN, f64::NAN),
            };
            writeln!(out, "{},{},{},{}", e.param, p, s, u8::from(self.best == Some(i)))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Trains every candidate of `grid` on `image` with the same settings and
/// seed. Divergent candidates are recorded instead of aborting the sweep.
pub fn grid_search(grid: &CandidateGrid, image: &Image, train: &TrainConfig, jobs: usize) -> Result<SweepReport> {
    let runs = grid.candidates().iter().map(|c| (*c, *train)).collect::<Vec<_>>();
    grid_search_runs(&runs, &grid.swept_values(), image, jobs)
}

/// Like [`grid_search`] with individual training settings per candidate.
pub fn grid_search_runs(
    runs: &[(EmbeddingConfig, TrainConfig)],
    params: &[f64],
    image: &Image,
    jobs: usize,
) -> Result<SweepReport> {
    if runs.is_empty() || runs.len() != params.len() {
        return Err(Error::InvalidArgument(
            "sweep needs one swept value per candidate and at least one candidate".into(),
        ));
    }
    let run_one = |(i, (config, train)): (usize, &(EmbeddingConfig, TrainConfig))| -> Result<SweepEntry> {
        match train_image(*config, image, train) {
            Ok((model, report)) => {
                log::info!("{config}: final PSNR {:.2} dB", report.final_psnr());
                Ok(SweepEntry {
                    config: *config,
                    param: params[i],
                    report: Some(report),
                    failure: None,
                    model: Some(model),
                })
            }
            Err(e @ Error::Diverged { .. }) => {
                log::warn!("{e}");
                Ok(SweepEntry {
                    config: *config,
                    param: params[i],
                    report: None,
                    failure: Some(e.to_string()),
                    model: None,
                })
            }
            Err(e) => Err(e),
        }
    };
    let entries: Vec<SweepEntry> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| runs.par_iter().enumerate().map(run_one).collect::<Result<_>>())?
    } else {
        runs.iter().enumerate().map(run_one).collect::<Result<_>>()?
    };

    let mut best: Option<usize> = None;
    for (i, e) in entries.iter().enumerate() {
        let Some(p) = e.final_psnr() else { continue };
        let replace = match best {
            None => true,
            Some(b) => {
                let q = entries[b].final_psnr().unwrap_or(f64::NEG_INFINITY);
                p > q || (p == q && e.config.cmp_frequency(&entries[b].config).is_lt())
            }
        };
        if replace {
            best = Some(i);
        }
    }
    Ok(SweepReport { entries, best })
}

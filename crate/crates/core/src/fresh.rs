//! Embedding selection by spectrum matching.
//!
//! Every candidate configuration is instantiated untrained, rendered on an
//! `R x R` grid, and its cropped, normalized spectrum is compared to the
//! target's with the 1D Wasserstein distance. Measurements are repeated over
//! independently seeded initializations and the candidate with the lowest
//! mean distance wins.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image_io::{make_coord_grid, resample_square, Image};
use crate::inr::{init_model, Architecture, EmbeddingConfig, Family};
use crate::spectrum::{normalize, spectrum_full_with, Dft2, Spectrum};
use crate::transport::{wasserstein_1d, DiscreteDistribution};

pub const DEFAULT_SPECTRUM_SIZE: usize = 64;
pub const DEFAULT_REPEATS: usize = 10;
pub const DEFAULT_RESOLUTION: usize = 256;

/// Candidate embedding configurations of a single family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateGrid {
    candidates: Vec<EmbeddingConfig>,
}

impl CandidateGrid {
    pub fn new(candidates: Vec<EmbeddingConfig>) -> Result<Self> {
        let first = candidates
            .first()
            .ok_or_else(|| Error::InvalidArgument("candidate grid is empty".into()))?;
        if candidates.iter().any(|c| c.family() != first.family()) {
            return Err(Error::InvalidArgument(
                "candidate grid mixes embedding families".into(),
            ));
        }
        for c in &candidates {
            c.validate()?;
        }
        Ok(Self { candidates })
    }

    /// Siren candidates for each `omega0`.
    pub fn siren(omegas: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(omegas.into_iter().map(|omega0| EmbeddingConfig::Siren { omega0 }).collect())
    }

    /// The default sweep for each family: `omega0 in {10,..,200}`,
    /// `sigma in {1,..,20}`, Finer `k in {0.0,..,3.0}` at `omega = 30`,
    /// Finer without bias `omega in {10,..,200}`.
    pub fn default_for(kind: ModelKind) -> Self {
        let candidates = match kind {
            ModelKind::Siren => (1..=20).map(|i| EmbeddingConfig::Siren { omega0: 10.0 * i as f64 }).collect(),
            ModelKind::Fourier => (1..=20).map(|i| EmbeddingConfig::Fourier { sigma: i as f64 }).collect(),
            ModelKind::Finer => (0..=30)
                .map(|i| EmbeddingConfig::Finer {
                    omega: 30.0,
                    k: i as f64 / 10.0,
                })
                .collect(),
            ModelKind::FinerK0 => (1..=20)
                .map(|i| EmbeddingConfig::Finer {
                    omega: 10.0 * i as f64,
                    k: 0.0,
                })
                .collect(),
        };
        Self { candidates }
    }

    pub fn candidates(&self) -> &[EmbeddingConfig] {
        &self.candidates
    }

    pub fn family(&self) -> Family {
        self.candidates[0].family()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// The scalar that varies across the grid for each candidate: `omega0`,
    /// `sigma`, or for Finer `k` when it varies and `omega` otherwise.
    pub fn swept_values(&self) -> Vec<f64> {
        let vary_k = self.family() == Family::Finer
            && self.candidates.windows(2).any(|w| w[0].frequency_key()[1] != w[1].frequency_key()[1]);
        self.candidates
            .iter()
            .map(|c| c.frequency_key()[usize::from(vary_k)])
            .collect()
    }
}

/// Model variants exposed to users; `FinerK0` is Finer with the bias removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Siren,
    Fourier,
    Finer,
    FinerK0,
}

impl ModelKind {
    /// Builds a config from the swept scalar. `finer_omega` fixes `omega`
    /// when sweeping Finer's `k`.
    pub fn config(self, value: f64, finer_omega: f64) -> EmbeddingConfig {
        match self {
            ModelKind::Siren => EmbeddingConfig::Siren { omega0: value },
            ModelKind::Fourier => EmbeddingConfig::Fourier { sigma: value },
            ModelKind::Finer => EmbeddingConfig::Finer {
                omega: finer_omega,
                k: value,
            },
            ModelKind::FinerK0 => EmbeddingConfig::Finer { omega: value, k: 0.0 },
        }
    }

    /// Conventional baseline setting of each model.
    pub fn baseline(self) -> EmbeddingConfig {
        match self {
            ModelKind::Siren => EmbeddingConfig::Siren { omega0: 30.0 },
            ModelKind::Fourier => EmbeddingConfig::Fourier { sigma: 10.0 },
            ModelKind::Finer => EmbeddingConfig::Finer { omega: 30.0, k: 1.0 },
            ModelKind::FinerK0 => EmbeddingConfig::Finer { omega: 30.0, k: 0.0 },
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for repeat `repeat` of `config`: `base ^ hash(config, repeat)`.
///
/// The hash depends only on the config's own bits, so adding or reordering
/// candidates leaves every existing measurement unchanged.
pub fn derive_seed(base: u64, config: &EmbeddingConfig, repeat: u64) -> u64 {
    let h = config
        .fingerprint()
        .iter()
        .chain(std::iter::once(&repeat))
        .fold(0x5EED_F4E5_u64, |acc, &word| splitmix64(acc ^ word));
    base ^ h
}

/// Settings shared by every measurement of a selection run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    /// Spectrum entries compared (`n`).
    pub spectrum_size: usize,
    pub repeats: usize,
    /// Working resolution `R` for renders and target spectra.
    pub resolution: usize,
    pub arch: Architecture,
    pub seed: u64,
    /// Worker threads used for candidate scoring.
    pub jobs: usize,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            spectrum_size: DEFAULT_SPECTRUM_SIZE,
            repeats: DEFAULT_REPEATS,
            resolution: DEFAULT_RESOLUTION,
            arch: Architecture::default(),
            seed: 0,
            jobs: 1,
        }
    }
}

impl SelectionParams {
    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        if self.resolution < 2 {
            return Err(Error::InvalidArgument(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        if self.spectrum_size == 0 || self.spectrum_size > self.resolution - 1 {
            return Err(Error::InvalidArgument(format!(
                "spectrum size {} outside 1..={} for resolution {}",
                self.spectrum_size,
                self.resolution - 1,
                self.resolution
            )));
        }
        self.arch.validate()
    }
}

/// Raw output of a freshly initialized model on a `side x side` grid.
pub fn render_init_output(config: EmbeddingConfig, arch: Architecture, seed: u64, side: usize) -> Result<Image> {
    if side < 2 {
        return Err(Error::InvalidArgument(format!("render side must be at least 2, got {side}")));
    }
    let model = init_model::<f32>(config, arch, seed)?;
    Ok(model.render(&make_coord_grid(side, side)))
}

/// Mean and standard error of repeated distance measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub config: EmbeddingConfig,
    pub mean: f64,
    pub se: f64,
    pub distances: Vec<f64>,
}

fn cropped_distribution(spectrum: &Spectrum, n: usize, what: &str) -> Result<DiscreteDistribution> {
    let cropped = spectrum.cropped(n)?;
    let normalized = normalize(&cropped).map_err(|_| {
        Error::Degenerate(format!("{what} has no spectral mass in frequencies 1..={n}"))
    })?;
    Ok(normalized.into())
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Scores one candidate against target spectra.
///
/// `targets` holds either one spectrum shared by every repeat or one per
/// repeat; each needs at least `n` entries. Repeat `r` renders the model
/// initialized with [`derive_seed`]`(seed, config, r)`.
pub fn score_candidate(config: EmbeddingConfig, targets: &[Spectrum], params: &SelectionParams) -> Result<CandidateScore> {
    params.validate()?;
    let plan = Dft2::new(params.resolution)?;
    score_with_plan(config, targets, params, &plan)
}

fn score_with_plan(config: EmbeddingConfig, targets: &[Spectrum], params: &SelectionParams, plan: &Dft2) -> Result<CandidateScore> {
    if targets.len() != 1 && targets.len() != params.repeats {
        return Err(Error::InvalidArgument(format!(
            "{} target spectra for {} repeats",
            targets.len(),
            params.repeats
        )));
    }
    let n = params.spectrum_size;
    let target_dists = targets
        .iter()
        .map(|t| cropped_distribution(t, n, "target"))
        .collect::<Result<Vec<_>>>()?;
    let mut distances = Vec::with_capacity(params.repeats);
    for r in 0..params.repeats {
        let seed = derive_seed(params.seed, &config, r as u64);
        let render = render_init_output(config, params.arch, seed, params.resolution)?;
        let spectrum = spectrum_full_with(plan, &render)?;
        let model_dist = cropped_distribution(&spectrum, n, &format!("untrained {config} output"))?;
        let target = &target_dists[r.min(target_dists.len() - 1)];
        distances.push(wasserstein_1d(&model_dist, target)?);
    }
    let (mean, se) = mean_and_se(&distances);
    Ok(CandidateScore {
        config,
        mean,
        se,
        distances,
    })
}

/// Outcome of a selection sweep, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub family: Family,
    pub scores: Vec<CandidateScore>,
    pub swept: Vec<f64>,
    pub chosen: EmbeddingConfig,
    pub chosen_index: usize,
    pub spectrum_size: usize,
    pub resolution: usize,
    pub repeats: usize,
    pub seed: u64,
    pub architecture: Architecture,
}

impl SelectionReport {
    pub fn chosen_score(&self) -> &CandidateScore {
        &self.scores[self.chosen_index]
    }

    /// `param,mean_wasserstein,se,chosen`
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "param,mean_wasserstein,se,chosen")?;
        for (i, (score, param)) in self.scores.iter().zip(&self.swept).enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                param,
                score.mean,
                score.se,
                u8::from(i == self.chosen_index)
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Target spectrum at the working resolution.
pub fn target_spectrum(target: &Image, resolution: usize) -> Result<Spectrum> {
    let square = resample_square(target, resolution)?;
    spectrum_full_with(&Dft2::new(resolution)?, &square)
}

/// Runs the selection on a single target image.
///
/// The target is resampled to `R x R` once and its spectrum is shared by all
/// repeats. Ties in mean distance go to the lowest-frequency candidate.
pub fn select(grid: &CandidateGrid, target: &Image, params: &SelectionParams) -> Result<SelectionReport> {
    let params = SelectionParams {
        arch: params.arch.with_channels(target.channels()),
        ..*params
    };
    params.validate()?;
    let spectrum = target_spectrum(target, params.resolution)?;
    cropped_distribution(&spectrum, params.spectrum_size, "target image")?;
    let plan = Dft2::new(params.resolution)?;
    let targets = std::slice::from_ref(&spectrum);

    let score = |c: &EmbeddingConfig| score_with_plan(*c, targets, &params, &plan);
    let scores: Vec<CandidateScore> = if params.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| grid.candidates.par_iter().map(score).collect::<Result<_>>())?
    } else {
        grid.candidates.iter().map(score).collect::<Result<_>>()?
    };

    let chosen_index = argmin_lowest_frequency(&scores);
    Ok(SelectionReport {
        family: grid.family(),
        chosen: scores[chosen_index].config,
        chosen_index,
        swept: grid.swept_values(),
        scores,
        spectrum_size: params.spectrum_size,
        resolution: params.resolution,
        repeats: params.repeats,
        seed: params.seed,
        architecture: params.arch,
    })
}

fn argmin_lowest_frequency(scores: &[CandidateScore]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        let b = &scores[best];
        let better = s.mean < b.mean
            || (s.mean == b.mean && s.config.cmp_frequency(&b.config).is_lt());
        if better {
            best = i;
        }
    }
    best
}

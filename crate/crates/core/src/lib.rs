//! Spectrum-matched selection of frequency embeddings for coordinate MLPs.
//!
//! An untrained coordinate network already has a characteristic output
//! spectrum, and that spectrum is governed by its embedding hyperparameter.
//! [`fresh::select`] renders untrained models for every candidate setting and
//! picks the one whose spectrum is closest to the target image's, without
//! training any of them.

pub mod error;
pub mod experiments;
pub mod fresh;
pub mod image_io;
pub mod inr;
pub mod spectrum;
pub mod transport;

pub use error::{Error, Result};
pub use fresh::{
    derive_seed, render_init_output, score_candidate, select, target_spectrum, CandidateGrid, CandidateScore,
    ModelKind, SelectionParams, SelectionReport,
};
pub use image_io::{load_png, make_coord_grid, quantize, resample_square, save_png, CoordGrid, Image};
pub use inr::{init_model, Architecture, EmbeddingConfig, Family, InrModel};
pub use spectrum::{dft2, normalize, spectrum_cropped, spectrum_full, NormalizedSpectrum, Spectrum};
pub use transport::{cdf, wasserstein_1d, DiscreteDistribution};

//! Coordinate MLPs with frequency embeddings, exact gradients and Adam.

mod adam;
mod checkpoint;
mod embedding;
mod grad;
mod model;
mod real;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use checkpoint::{from_json, load_checkpoint, save_checkpoint, to_json, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use embedding::{EmbeddingConfig, Family};
pub use grad::{loss_and_grads, Gradients};
pub use model::{coords_to_array, frequency_magnitudes, init_model, Architecture, InrModel, Layer, INPUT_DIM};
pub use real::{sin_cos_f32, Real};

//! JSON model checkpoints.
//!
//! Layout (version 1):
//!
//! ```json
//! {
//!   "format": "fresh-inr-checkpoint",
//!   "version": 1,
//!   "config": {"family": "siren", "omega0": 30.0},
//!   "architecture": {"hidden_layers": 3, "width": 256, "channels": 3, "hidden_omega": 30.0},
//!   "layers": [
//!     {"rows": 256, "cols": 2, "weight": [...], "bias": [...] | null},
//!     ...
//!   ]
//! }
//! ```
//!
//! Layers run from the embedding through the hidden layers to the output.
//! Weights are row-major `rows x cols` (`out x in`). Values are stored as
//! JSON numbers in double precision, which round-trips `f32` exactly.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::embedding::EmbeddingConfig;
use super::model::{Architecture, InrModel, Layer};
use super::real::Real;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "fresh-inr-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct LayerRecord {
    rows: usize,
    cols: usize,
    weight: Vec<f64>,
    bias: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointRecord {
    format: String,
    version: u32,
    config: EmbeddingConfig,
    architecture: Architecture,
    layers: Vec<LayerRecord>,
}

pub fn to_json<T: Real>(model: &InrModel<T>) -> Result<String> {
    let record = CheckpointRecord {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        config: *model.config(),
        architecture: *model.architecture(),
        layers: model
            .layers()
            .iter()
            .map(|l| LayerRecord {
                rows: l.weight.nrows(),
                cols: l.weight.ncols(),
                weight: l.weight.iter().map(|v| v.as_f64()).collect(),
                bias: l.bias.as_ref().map(|b| b.iter().map(|v| v.as_f64()).collect()),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&record)?)
}

pub fn from_json<T: Real>(text: &str) -> Result<InrModel<T>> {
    let record: CheckpointRecord = serde_json::from_str(text)?;
    decode(record)
}

fn decode<T: Real>(record: CheckpointRecord) -> Result<InrModel<T>> {
    if record.format != CHECKPOINT_FORMAT {
        return Err(Error::Checkpoint(format!("unknown format {:?}", record.format)));
    }
    if record.version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {}", record.version)));
    }
    let layers = record
        .layers
        .into_iter()
        .map(|l| {
            let weight = Array2::from_shape_vec(
                (l.rows, l.cols),
                l.weight.into_iter().map(T::from_f64).collect(),
            )
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
            Ok(Layer {
                weight,
                bias: l.bias.map(|b| b.into_iter().map(T::from_f64).collect::<Array1<T>>()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    InrModel::from_layers(record.config, record.architecture, layers)
        .map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn save_checkpoint<T: Real>(model: &InrModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(model)?).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint<T: Real>(path: impl AsRef<Path>) -> Result<InrModel<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let record: CheckpointRecord = serde_json::from_reader(BufReader::new(file))?;
    decode(record)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::inr::init_model;

    #[test]
    fn round_trip_preserves_every_bit() {
        let arch = Architecture {
            hidden_layers: 2,
            width: 7,
            channels: 3,
            hidden_omega: 30.0,
        };
        for cfg in [
            EmbeddingConfig::Siren { omega0: 42.0 },
            EmbeddingConfig::Fourier { sigma: 3.0 },
            EmbeddingConfig::Finer { omega: 30.0, k: 0.0 },
        ] {
            let m = init_model::<f32>(cfg, arch, 8).unwrap();
            let back: InrModel<f32> = from_json(&to_json(&m).unwrap()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn rejects_foreign_documents() {
        let m = init_model::<f32>(EmbeddingConfig::Siren { omega0: 30.0 }, Architecture::default().with_channels(1), 0).unwrap();
        let text = to_json(&m).unwrap().replace(CHECKPOINT_FORMAT, "other");
        assert!(matches!(from_json::<f32>(&text), Err(Error::Checkpoint(_))));
        assert!(from_json::<f32>("{}").is_err());
    }

    #[test]
    fn rejects_broken_shapes() {
        let m = init_model::<f32>(EmbeddingConfig::Siren { omega0: 30.0 }, Architecture::default().with_channels(1), 0).unwrap();
        let text = to_json(&m).unwrap().replacen("\"rows\":256", "\"rows\":255", 1);
        assert!(from_json::<f32>(&text).is_err());
    }
}

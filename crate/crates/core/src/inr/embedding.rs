use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency embedding applied to input coordinates.
///
/// * `Siren`: `sin(omega0 * W x + b)`
/// * `Fourier`: `[sin(2 pi W x), cos(2 pi W x)]` with `W ~ N(0, sigma^2)`
/// * `Finer`: `phi(omega * (W x + b))`, `phi(t) = sin((|t| + 1) t)` and
///   `b ~ U(-k, k)`; `k = 0` removes the bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum EmbeddingConfig {
    Siren { omega0: f64 },
    Fourier { sigma: f64 },
    Finer { omega: f64, k: f64 },
}

/// Embedding family without its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Siren,
    Fourier,
    Finer,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Siren => "siren",
            Family::Fourier => "fourier",
            Family::Finer => "finer",
        })
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EmbeddingConfig::Siren { omega0 } => omega0.is_finite() && omega0 > 0.0,
            EmbeddingConfig::Fourier { sigma } => sigma.is_finite() && sigma > 0.0,
            EmbeddingConfig::Finer { omega, k } => {
                omega.is_finite() && omega > 0.0 && k.is_finite() && k >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid embedding hyperparameters: {self}"
            )))
        }
    }

    pub fn family(&self) -> Family {
        match self {
            EmbeddingConfig::Siren { .. } => Family::Siren,
            EmbeddingConfig::Fourier { .. } => Family::Fourier,
            EmbeddingConfig::Finer { .. } => Family::Finer,
        }
    }

    /// Frequency hyperparameters in significance order; larger means higher
    /// embedding frequencies.
    pub fn frequency_key(&self) -> [f64; 2] {
        match *self {
            EmbeddingConfig::Siren { omega0 } => [omega0, 0.0],
            EmbeddingConfig::Fourier { sigma } => [sigma, 0.0],
            EmbeddingConfig::Finer { omega, k } => [omega, k],
        }
    }

    /// Orders two configs of the same family from low to high frequency.
    pub fn cmp_frequency(&self, other: &Self) -> Ordering {
        let (a, b) = (self.frequency_key(), other.frequency_key());
        a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
    }

    pub fn has_embedding_bias(&self) -> bool {
        match *self {
            EmbeddingConfig::Siren { .. } => true,
            EmbeddingConfig::Fourier { .. } => false,
            EmbeddingConfig::Finer { k, .. } => k > 0.0,
        }
    }

    /// Whether hidden layers use sine (Siren, Finer) or ReLU (Fourier).
    pub fn sine_hidden(&self) -> bool {
        !matches!(self, EmbeddingConfig::Fourier { .. })
    }

    /// Stable bit pattern identifying the config, used for seed derivation.
    pub fn fingerprint(&self) -> [u64; 3] {
        match *self {
            EmbeddingConfig::Siren { omega0 } => [1, omega0.to_bits(), 0],
            EmbeddingConfig::Fourier { sigma } => [2, sigma.to_bits(), 0],
            EmbeddingConfig::Finer { omega, k } => [3, omega.to_bits(), k.to_bits()],
        }
    }
}

impl fmt::Display for EmbeddingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EmbeddingConfig::Siren { omega0 } => write!(f, "siren(omega0={omega0})"),
            EmbeddingConfig::Fourier { sigma } => write!(f, "fourier(sigma={sigma})"),
            EmbeddingConfig::Finer { omega, k } => write!(f, "finer(omega={omega}, k={k})"),
        }
    }
}

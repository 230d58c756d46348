use std::f64::consts::PI;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::embedding::EmbeddingConfig;
use super::real::Real;
use crate::error::{Error, Result};
use crate::image_io::{CoordGrid, Image};

/// Input dimension: pixel coordinates are 2-vectors.
pub const INPUT_DIM: usize = 2;

/// Rows evaluated per chunk when rendering a whole grid.
const RENDER_CHUNK: usize = 8192;

/// Layer sizes of the coordinate MLP.
///
/// The network is `embedding (2 -> width)`, then `hidden_layers` dense layers
/// `width -> width`, then a linear output `width -> channels`. Sine hidden
/// layers compute `sin(hidden_omega * (W h + b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub hidden_layers: usize,
    pub width: usize,
    pub channels: usize,
    pub hidden_omega: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            hidden_layers: 3,
            width: 256,
            channels: 3,
            hidden_omega: 30.0,
        }
    }
}

impl Architecture {
    pub fn with_channels(self, channels: usize) -> Self {
        Self { channels, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.hidden_layers == 0 {
            return Err(Error::InvalidArgument(format!(
                "width and hidden_layers must be positive, got {} and {}",
                self.width, self.hidden_layers
            )));
        }
        if self.channels != 1 && self.channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "channels must be 1 or 3, got {}",
                self.channels
            )));
        }
        if !(self.hidden_omega.is_finite() && self.hidden_omega > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hidden_omega must be positive, got {}",
                self.hidden_omega
            )));
        }
        Ok(())
    }
}

/// Dense layer parameters. `weight` is `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T> {
    pub weight: Array2<T>,
    pub bias: Option<Array1<T>>,
}

impl<T: Real> Layer<T> {
    pub(crate) fn zeros_like(&self) -> Self {
        Self {
            weight: Array2::zeros(self.weight.raw_dim()),
            bias: self.bias.as_ref().map(|b| Array1::zeros(b.raw_dim())),
        }
    }

    pub(crate) fn param_count(&self) -> usize {
        self.weight.len() + self.bias.as_ref().map_or(0, |b| b.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Activation {
    Sine,
    Finer,
    /// `[sin z, cos z]` concatenated along features.
    SinCos,
    Relu,
    Identity,
}

/// How a layer maps its input: `z = weight_scale * W h + bias_scale * b`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LayerSpec {
    pub weight_scale: f64,
    pub bias_scale: f64,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InrModel<T> {
    config: EmbeddingConfig,
    arch: Architecture,
    layers: Vec<Layer<T>>,
}

/// Activations recorded during a forward pass.
pub(crate) struct Trace<T> {
    /// `inputs[l]` is the input of layer `l`; the final entry is the output.
    pub inputs: Vec<Array2<T>>,
    /// Activation derivative at the pre-activation, for sine and Finer layers.
    pub derivs: Vec<Option<Array2<T>>>,
}

fn uniform(bound: f64) -> Uniform<f64> {
    Uniform::new_inclusive(-bound, bound).expect("finite symmetric bound")
}

fn sample_matrix(rows: usize, cols: usize, dist: &impl Distribution<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..rows * cols).map(|_| dist.sample(rng)).collect()
}

/// `(rows, cols, weight, bias)` before conversion to `T`.
type RawLayer = (usize, usize, Vec<f64>, Option<Vec<f64>>);

/// Initializes a model deterministically from `seed`.
///
/// Embedding weights: `U[-1/d, 1/d]` (Siren, Finer) or `N(0, sigma^2)`
/// (Fourier). Siren embedding bias is a uniform phase in `[-pi, pi]`; Finer
/// bias is `U(-k, k)`. Sine hidden and output layers use
/// `U[+-sqrt(6/fan_in)/hidden_omega]`; ReLU networks use `U[+-1/sqrt(fan_in)]`.
/// Hidden and output biases are `U[+-1/sqrt(fan_in)]`.
pub fn init_model<T: Real>(config: EmbeddingConfig, arch: Architecture, seed: u64) -> Result<InrModel<T>> {
    config.validate()?;
    arch.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<RawLayer> = Vec::new();

    let w = arch.width;
    let emb_weight = match config {
        EmbeddingConfig::Siren { .. } | EmbeddingConfig::Finer { .. } => {
            sample_matrix(w, INPUT_DIM, &uniform(1.0 / INPUT_DIM as f64), &mut rng)
        }
        EmbeddingConfig::Fourier { sigma } => {
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            sample_matrix(w, INPUT_DIM, &normal, &mut rng)
        }
    };
    let emb_bias = match config {
        EmbeddingConfig::Siren { .. } => Some(sample_matrix(w, 1, &uniform(PI), &mut rng)),
        EmbeddingConfig::Finer { k, .. } if k > 0.0 => Some(sample_matrix(w, 1, &uniform(k), &mut rng)),
        _ => None,
    };
    raw.push((w, INPUT_DIM, emb_weight, emb_bias));

    let first_hidden_in = match config {
        EmbeddingConfig::Fourier { .. } => 2 * w,
        _ => w,
    };
    let weight_bound = |fan_in: usize| {
        if config.sine_hidden() {
            (6.0 / fan_in as f64).sqrt() / arch.hidden_omega
        } else {
            1.0 / (fan_in as f64).sqrt()
        }
    };
    let mut fan_in = first_hidden_in;
    for _ in 0..arch.hidden_layers {
        let weight = sample_matrix(w, fan_in, &uniform(weight_bound(fan_in)), &mut rng);
        let bias = sample_matrix(w, 1, &uniform(1.0 / (fan_in as f64).sqrt()), &mut rng);
        raw.push((w, fan_in, weight, Some(bias)));
        fan_in = w;
    }
    let weight = sample_matrix(arch.channels, fan_in, &uniform(weight_bound(fan_in)), &mut rng);
    let bias = sample_matrix(arch.channels, 1, &uniform(1.0 / (fan_in as f64).sqrt()), &mut rng);
    raw.push((arch.channels, fan_in, weight, Some(bias)));

    let layers = raw
        .into_iter()
        .map(|(rows, cols, weight, bias)| Layer {
            weight: Array2::from_shape_vec((rows, cols), weight.into_iter().map(T::from_f64).collect())
                .expect("sampled to shape"),
            bias: bias.map(|b| b.into_iter().map(T::from_f64).collect()),
        })
        .collect();
    Ok(InrModel { config, arch, layers })
}

impl<T: Real> InrModel<T> {
    /// Assembles a model from explicit layers, checking that shapes chain.
    pub fn from_layers(config: EmbeddingConfig, arch: Architecture, layers: Vec<Layer<T>>) -> Result<Self> {
        config.validate()?;
        arch.validate()?;
        let model = Self { config, arch, layers };
        let expected = model.expected_shapes();
        if model.layers.len() != expected.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} layers, expected {}",
                model.layers.len(),
                expected.len()
            )));
        }
        for (i, (layer, (rows, cols, has_bias))) in model.layers.iter().zip(expected).enumerate() {
            let bias_ok = match &layer.bias {
                Some(b) => has_bias && b.len() == rows,
                None => !has_bias,
            };
            if layer.weight.dim() != (rows, cols) || !bias_ok {
                return Err(Error::ShapeMismatch(format!(
                    "layer {i}: weight {:?}, expected ({rows}, {cols}) with bias={has_bias}",
                    layer.weight.dim()
                )));
            }
        }
        if model.layers.iter().any(|l| {
            l.weight.iter().any(|v| !v.is_finite())
                || l.bias.as_ref().is_some_and(|b| b.iter().any(|v| !v.is_finite()))
        }) {
            return Err(Error::InvalidArgument("non-finite parameter".into()));
        }
        Ok(model)
    }

    fn expected_shapes(&self) -> Vec<(usize, usize, bool)> {
        let w = self.arch.width;
        let mut shapes = vec![(w, INPUT_DIM, self.config.has_embedding_bias())];
        let mut fan_in = match self.config {
            EmbeddingConfig::Fourier { .. } => 2 * w,
            _ => w,
        };
        for _ in 0..self.arch.hidden_layers {
            shapes.push((w, fan_in, true));
            fan_in = w;
        }
        shapes.push((self.arch.channels, fan_in, true));
        shapes
    }

    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    pub fn channels(&self) -> usize {
        self.arch.channels
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// All parameters, layer by layer: weight (row-major) then bias.
    pub fn params_flat(&self) -> Vec<T> {
        flatten(&self.layers)
    }

    pub fn set_params_flat(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} parameters",
                values.len(),
                self.param_count()
            )));
        }
        let mut it = values.iter().copied();
        for layer in &mut self.layers {
            layer.weight.iter_mut().for_each(|p| *p = it.next().unwrap());
            if let Some(b) = &mut layer.bias {
                b.iter_mut().for_each(|p| *p = it.next().unwrap());
            }
        }
        Ok(())
    }

    /// Converts every parameter to another precision.
    pub fn cast<U: Real>(&self) -> InrModel<U> {
        InrModel {
            config: self.config,
            arch: self.arch,
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weight: l.weight.mapv(|v| U::from_f64(v.as_f64())),
                    bias: l.bias.as_ref().map(|b| b.mapv(|v| U::from_f64(v.as_f64()))),
                })
                .collect(),
        }
    }

    pub(crate) fn layer_specs(&self) -> Vec<LayerSpec> {
        let hidden = if self.config.sine_hidden() {
            LayerSpec {
                weight_scale: self.arch.hidden_omega,
                bias_scale: self.arch.hidden_omega,
                activation: Activation::Sine,
            }
        } else {
            LayerSpec {
                weight_scale: 1.0,
                bias_scale: 1.0,
                activation: Activation::Relu,
            }
        };
        let embedding = match self.config {
            EmbeddingConfig::Siren { omega0 } => LayerSpec {
                weight_scale: omega0,
                bias_scale: 1.0,
                activation: Activation::Sine,
            },
            EmbeddingConfig::Fourier { .. } => LayerSpec {
                weight_scale: 2.0 * PI,
                bias_scale: 0.0,
                activation: Activation::SinCos,
            },
            EmbeddingConfig::Finer { omega, .. } => LayerSpec {
                weight_scale: omega,
                bias_scale: omega,
                activation: Activation::Finer,
            },
        };
        let output = LayerSpec {
            weight_scale: 1.0,
            bias_scale: 1.0,
            activation: Activation::Identity,
        };
        let mut specs = vec![embedding];
        specs.extend(std::iter::repeat_n(hidden, self.arch.hidden_layers));
        specs.push(output);
        specs
    }

    fn check_input(x: &ArrayView2<T>) -> Result<()> {
        if x.ncols() != INPUT_DIM {
            return Err(Error::ShapeMismatch(format!(
                "inputs have {} columns, expected {INPUT_DIM}",
                x.ncols()
            )));
        }
        Ok(())
    }

    /// Embedding features for a batch of coordinates (`B x 2`).
    pub fn embed(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        Self::check_input(&x)?;
        let spec = self.layer_specs()[0];
        let z = affine(x, &self.layers[0], &spec);
        Ok(activate(z, spec.activation, false).0)
    }

    /// Network output for a batch of coordinates: `B x channels`.
    pub fn forward(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        Self::check_input(&x)?;
        let mut h = x.to_owned();
        for (layer, spec) in self.layers.iter().zip(self.layer_specs()) {
            let z = affine(h.view(), layer, &spec);
            h = activate(z, spec.activation, false).0;
        }
        Ok(h)
    }

    pub(crate) fn forward_traced(&self, x: ArrayView2<T>) -> Result<Trace<T>> {
        Self::check_input(&x)?;
        let specs = self.layer_specs();
        let mut inputs = Vec::with_capacity(self.layers.len() + 1);
        let mut derivs = Vec::with_capacity(self.layers.len());
        inputs.push(x.to_owned());
        for (layer, spec) in self.layers.iter().zip(&specs) {
            let z = affine(inputs.last().unwrap().view(), layer, spec);
            let (out, deriv) = activate(z, spec.activation, true);
            inputs.push(out);
            derivs.push(deriv);
        }
        Ok(Trace { inputs, derivs })
    }

    /// Evaluates the network at every pixel of `grid`, returning raw
    /// (unclamped) outputs as a channel-major image.
    pub fn render(&self, grid: &CoordGrid) -> Image {
        let (h, w, c) = (grid.height(), grid.width(), self.arch.channels);
        let plane = h * w;
        let mut data = vec![0.0; c * plane];
        for (chunk_idx, chunk) in grid.coords().chunks(RENDER_CHUNK).enumerate() {
            let x = coords_to_array::<T>(chunk);
            let y = self.forward(x.view()).expect("coordinate batch has two columns");
            let offset = chunk_idx * RENDER_CHUNK;
            for (i, row) in y.outer_iter().enumerate() {
                for (ch, v) in row.iter().enumerate() {
                    data[ch * plane + offset + i] = v.as_f64();
                }
            }
        }
        Image::new(c, h, w, data).expect("render fills every sample")
    }
}

pub(crate) fn flatten<T: Real>(layers: &[Layer<T>]) -> Vec<T> {
    let mut out = Vec::new();
    for layer in layers {
        out.extend(layer.weight.iter().copied());
        if let Some(b) = &layer.bias {
            out.extend(b.iter().copied());
        }
    }
    out
}

/// Stacks coordinate pairs into a `B x 2` array.
pub fn coords_to_array<T: Real>(coords: &[[f64; 2]]) -> Array2<T> {
    Array2::from_shape_fn((coords.len(), INPUT_DIM), |(i, j)| T::from_f64(coords[i][j]))
}

pub(crate) fn affine<T: Real>(input: ArrayView2<T>, layer: &Layer<T>, spec: &LayerSpec) -> Array2<T> {
    let mut z = Array2::zeros((input.nrows(), layer.weight.nrows()));
    general_mat_mul(
        T::from_f64(spec.weight_scale),
        &input,
        &layer.weight.t(),
        T::zero(),
        &mut z,
    );
    if let Some(b) = &layer.bias {
        let scaled = b.mapv(|v| v * T::from_f64(spec.bias_scale));
        z = z + &scaled;
    }
    z
}

/// Applies an activation; with `keep_deriv`, also returns the derivative at
/// `z` for sine and Finer activations.
pub(crate) fn activate<T: Real>(mut z: Array2<T>, act: Activation, keep_deriv: bool) -> (Array2<T>, Option<Array2<T>>) {
    match act {
        Activation::Identity => (z, None),
        Activation::Relu => {
            z.mapv_inplace(|v| v.max(T::zero()));
            (z, None)
        }
        Activation::Sine => {
            let mut out = Array2::zeros(z.raw_dim());
            if keep_deriv {
                let mut cos = Array2::zeros(z.raw_dim());
                T::sin_cos_into(
                    z.as_slice().unwrap(),
                    out.as_slice_mut().unwrap(),
                    cos.as_slice_mut().unwrap(),
                );
                (out, Some(cos))
            } else {
                T::sin_into(z.as_slice().unwrap(), out.as_slice_mut().unwrap());
                (out, None)
            }
        }
        Activation::Finer => {
            // phi(t) = sin((|t| + 1) t), phi'(t) = cos((|t| + 1) t) (2|t| + 1)
            let arg = z.mapv(|t| (t.abs() + T::one()) * t);
            let mut out = Array2::zeros(z.raw_dim());
            let mut cos = Array2::zeros(z.raw_dim());
            T::sin_cos_into(
                arg.as_slice().unwrap(),
                out.as_slice_mut().unwrap(),
                cos.as_slice_mut().unwrap(),
            );
            if keep_deriv {
                let two = T::from_f64(2.0);
                Zip::from(&mut cos)
                    .and(&z)
                    .for_each(|c, &t| *c = *c * (two * t.abs() + T::one()));
                (out, Some(cos))
            } else {
                (out, None)
            }
        }
        Activation::SinCos => {
            let (rows, m) = z.dim();
            let mut sin = Array2::zeros((rows, m));
            let mut cos = Array2::zeros((rows, m));
            T::sin_cos_into(
                z.as_slice().unwrap(),
                sin.as_slice_mut().unwrap(),
                cos.as_slice_mut().unwrap(),
            );
            let mut out = Array2::zeros((rows, 2 * m));
            out.slice_mut(s![.., ..m]).assign(&sin);
            out.slice_mut(s![.., m..]).assign(&cos);
            (out, None)
        }
    }
}

/// Per-row frequency magnitudes of the embedding: `scale * ||w_i||_2` with
/// scale `omega0` (Siren), `omega` (Finer) or `2 pi` (Fourier).
pub fn frequency_magnitudes<T: Real>(model: &InrModel<T>) -> Vec<f64> {
    let scale = match model.config {
        EmbeddingConfig::Siren { omega0 } => omega0,
        EmbeddingConfig::Finer { omega, .. } => omega,
        EmbeddingConfig::Fourier { .. } => 2.0 * PI,
    };
    model.layers[0]
        .weight
        .axis_iter(Axis(0))
        .map(|row| scale * row.iter().map(|v| v.as_f64().powi(2)).sum::<f64>().sqrt())
        .collect()
}

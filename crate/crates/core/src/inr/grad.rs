//! Reverse-mode gradients of the mean squared error.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, ArrayView2, Axis, Zip};

use super::model::{flatten, Activation, InrModel, Layer};
use super::real::Real;
use crate::error::{Error, Result};

/// Parameter-shaped gradient collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    layers: Vec<Layer<T>>,
}

impl<T: Real> Gradients<T> {
    pub fn zeros_like(model: &InrModel<T>) -> Self {
        Self {
            layers: model.layers().iter().map(Layer::zeros_like).collect(),
        }
    }

    /// Gradient with the model's layout holding `values` in flat order.
    pub fn from_flat(model: &InrModel<T>, values: &[T]) -> Result<Self> {
        let mut holder = model.clone();
        holder.set_params_flat(values)?;
        Ok(Self {
            layers: holder.layers().to_vec(),
        })
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn flat(&self) -> Vec<T> {
        flatten(&self.layers)
    }

    pub fn max_abs(&self) -> f64 {
        self.flat().iter().map(|v| v.as_f64().abs()).fold(0.0, f64::max)
    }
}

/// Mean squared error over all `B x channels` samples and its exact gradient
/// with respect to every parameter.
pub fn loss_and_grads<T: Real>(
    model: &InrModel<T>,
    coords: ArrayView2<T>,
    targets: ArrayView2<T>,
) -> Result<(f64, Gradients<T>)> {
    if coords.nrows() != targets.nrows() || targets.ncols() != model.channels() {
        return Err(Error::ShapeMismatch(format!(
            "coords {:?} vs targets {:?} for {} channels",
            coords.dim(),
            targets.dim(),
            model.channels()
        )));
    }
    if coords.nrows() == 0 {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let trace = model.forward_traced(coords)?;
    let output = trace.inputs.last().unwrap();
    let count = (targets.len()) as f64;

    let mut residual = output - &targets;
    let loss = residual.iter().map(|r| r.as_f64().powi(2)).sum::<f64>() / count;
    let two_over_n = T::from_f64(2.0 / count);
    residual.mapv_inplace(|r| r * two_over_n);

    let specs = model.layer_specs();
    let mut grads = Vec::with_capacity(specs.len());
    let mut upstream = residual;
    for l in (0..specs.len()).rev() {
        let spec = specs[l];
        let layer = &model.layers()[l];
        let dz = match spec.activation {
            Activation::Identity => upstream,
            Activation::Sine | Activation::Finer => {
                let deriv = trace.derivs[l].as_ref().expect("traced derivative");
                upstream * deriv
            }
            Activation::Relu => {
                let out = &trace.inputs[l + 1];
                Zip::from(&mut upstream).and(out).for_each(|g, &o| {
                    if o <= T::zero() {
                        *g = T::zero();
                    }
                });
                upstream
            }
            Activation::SinCos => {
                let out = &trace.inputs[l + 1];
                let m = out.ncols() / 2;
                let (sin, cos) = (out.slice(s![.., ..m]), out.slice(s![.., m..]));
                let (g_sin, g_cos) = (upstream.slice(s![.., ..m]), upstream.slice(s![.., m..]));
                &g_sin * &cos - &g_cos * &sin
            }
        };
        let input = &trace.inputs[l];
        let ws = T::from_f64(spec.weight_scale);
        let mut gw = Array2::zeros(layer.weight.raw_dim());
        general_mat_mul(ws, &dz.t(), input, T::zero(), &mut gw);
        let gb = layer
            .bias
            .as_ref()
            .map(|_| dz.sum_axis(Axis(0)).mapv(|v| v * T::from_f64(spec.bias_scale)));
        grads.push(Layer { weight: gw, bias: gb });
        if l > 0 {
            let mut down = Array2::zeros((dz.nrows(), layer.weight.ncols()));
            general_mat_mul(ws, &dz, &layer.weight, T::zero(), &mut down);
            upstream = down;
        } else {
            break;
        }
    }
    grads.reverse();
    Ok((loss, Gradients { layers: grads }))
}

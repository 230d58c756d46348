use ndarray::Zip;
use serde::{Deserialize, Serialize};

use super::grad::Gradients;
use super::model::{InrModel, Layer};
use super::real::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates for every parameter of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub hyper: AdamConfig,
    step: u64,
    first: Vec<Layer<T>>,
    second: Vec<Layer<T>>,
}

impl<T: Real> AdamState<T> {
    pub fn new(model: &InrModel<T>, hyper: AdamConfig) -> Self {
        let zeros: Vec<Layer<T>> = model.layers().iter().map(Layer::zeros_like).collect();
        Self {
            hyper,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

fn update<T: Real>(
    param: &mut [T],
    grad: &[T],
    m: &mut [T],
    v: &mut [T],
    coeffs: (T, T, T, T, T, T),
) {
    let (b1, b2, c1, c2, lr, eps) = coeffs;
    let one = T::one();
    for (((p, &g), m), v) in param.iter_mut().zip(grad).zip(m.iter_mut()).zip(v.iter_mut()) {
        *m = b1 * *m + (one - b1) * g;
        *v = b2 * *v + (one - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// One bias-corrected Adam update of every parameter in place.
pub fn adam_step<T: Real>(model: &mut InrModel<T>, grads: &Gradients<T>, state: &mut AdamState<T>) -> Result<()> {
    let shapes_match = model.layers().len() == grads.layers().len()
        && state.first.len() == grads.layers().len()
        && model.layers().iter().zip(grads.layers()).zip(&state.first).all(|((p, g), m)| {
            p.weight.dim() == g.weight.dim()
                && m.weight.dim() == g.weight.dim()
                && p.bias.as_ref().map(|b| b.len()) == g.bias.as_ref().map(|b| b.len())
                && m.bias.as_ref().map(|b| b.len()) == g.bias.as_ref().map(|b| b.len())
        });
    if !shapes_match {
        return Err(Error::ShapeMismatch(
            "gradients or optimizer state do not match the model".into(),
        ));
    }
    state.step += 1;
    let h = state.hyper;
    let t = state.step as i32;
    let coeffs = (
        T::from_f64(h.beta1),
        T::from_f64(h.beta2),
        T::from_f64(1.0 - h.beta1.powi(t)),
        T::from_f64(1.0 - h.beta2.powi(t)),
        T::from_f64(h.lr),
        T::from_f64(h.eps),
    );
    let layers = model.layers_mut();
    for (((p, g), m), v) in layers
        .iter_mut()
        .zip(grads.layers())
        .zip(&mut state.first)
        .zip(&mut state.second)
    {
        Zip::from(p.weight.rows_mut())
            .and(g.weight.rows())
            .and(m.weight.rows_mut())
            .and(v.weight.rows_mut())
            .for_each(|mut pr, gr, mut mr, mut vr| {
                update(
                    pr.as_slice_mut().unwrap(),
                    gr.as_slice().unwrap(),
                    mr.as_slice_mut().unwrap(),
                    vr.as_slice_mut().unwrap(),
                    coeffs,
                )
            });
        if let (Some(pb), Some(gb), Some(mb), Some(vb)) = (&mut p.bias, &g.bias, &mut m.bias, &mut v.bias) {
            update(
                pb.as_slice_mut().unwrap(),
                gb.as_slice().unwrap(),
                mb.as_slice_mut().unwrap(),
                vb.as_slice_mut().unwrap(),
                coeffs,
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inr::{init_model, Architecture, EmbeddingConfig};
    use ndarray::{Array1, Array2};

    fn scalar_model(value: f64) -> InrModel<f64> {
        let arch = Architecture {
            hidden_layers: 1,
            width: 1,
            channels: 1,
            hidden_omega: 30.0,
        };
        let layers = vec![
            Layer {
                weight: Array2::from_elem((1, 2), value),
                bias: Some(Array1::from(vec![0.0])),
            },
            Layer {
                weight: Array2::zeros((1, 1)),
                bias: Some(Array1::zeros(1)),
            },
            Layer {
                weight: Array2::zeros((1, 1)),
                bias: Some(Array1::zeros(1)),
            },
        ];
        InrModel::from_layers(EmbeddingConfig::Siren { omega0: 1.0 }, arch, layers).unwrap()
    }

    fn grads_with(model: &InrModel<f64>, first: f64) -> Gradients<f64> {
        let mut g = vec![0.0; model.param_count()];
        g[0] = first;
        Gradients::from_flat(model, &g).unwrap()
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut m = init_model::<f64>(EmbeddingConfig::Siren { omega0: 30.0 }, Architecture::default().with_channels(1), 0).unwrap();
        let before = m.clone();
        let g = Gradients::zeros_like(&m);
        let mut st = AdamState::new(&m, AdamConfig::with_lr(1e-3));
        adam_step(&mut m, &g, &mut st).unwrap();
        assert_eq!(m, before);
        assert_eq!(st.step_count(), 1);
    }

    #[test]
    fn first_step_by_hand() {
        let mut m = scalar_model(0.0);
        let g = grads_with(&m, 1.0);
        let mut st = AdamState::new(&m, AdamConfig::with_lr(0.1));
        adam_step(&mut m, &g, &mut st).unwrap();
        let expected = -0.1 * (1.0 / (1.0 + 1e-8));
        assert!((m.layers()[0].weight[[0, 0]] - expected).abs() < 1e-15);
        assert_eq!(m.layers()[0].weight[[0, 1]], 0.0);
    }

    #[test]
    fn trajectories_repeat() {
        let run = || {
            let mut m = scalar_model(0.3);
            let mut st = AdamState::new(&m, AdamConfig::with_lr(0.01));
            for i in 0..5 {
                let g = grads_with(&m, (i as f64 * 0.7).sin());
                adam_step(&mut m, &g, &mut st).unwrap();
            }
            m
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn shape_mismatch() {
        let mut a = init_model::<f64>(EmbeddingConfig::Siren { omega0: 30.0 }, Architecture::default().with_channels(1), 0).unwrap();
        let b = init_model::<f64>(EmbeddingConfig::Siren { omega0: 30.0 }, Architecture::default().with_channels(3), 0).unwrap();
        let mut st = AdamState::new(&a, AdamConfig::with_lr(1e-3));
        assert!(adam_step(&mut a, &Gradients::zeros_like(&b), &mut st).is_err());
    }
}

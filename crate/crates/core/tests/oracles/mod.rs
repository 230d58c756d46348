//! Slow reference implementations shared by the oracle tests and the
//! acceptance suite.
#![allow(dead_code)]

use fresh_core::inr::{loss_and_grads, InrModel};
use fresh_core::Image;
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

pub fn naive_dft(a: &[f64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); n * n];
    for j in 0..n {
        for k in 0..n {
            let mut acc = Complex64::default();
            for m in 0..n {
                for q in 0..n {
                    let angle = -2.0 * std::f64::consts::PI * ((j * m) as f64 + (k * q) as f64) / n as f64;
                    acc += Complex64::from_polar(a[m * n + q], angle);
                }
            }
            out[j * n + k] = acc;
        }
    }
    out
}

pub fn brute_spectrum(img: &Image) -> Vec<f64> {
    let n = img.height();
    let mut s = vec![0.0; n - 1];
    for c in 0..img.channels() {
        let f = naive_dft(img.channel(c), n);
        for i in 0..n {
            for j in 0..n {
                let d = i + j;
                if (1..n).contains(&d) {
                    s[d - 1] += f[i * n + j].norm();
                }
            }
        }
    }
    s
}

/// Minimum transport cost between `p` and `q` on points `0..n` with cost
/// `|i - j|`, by successive shortest augmenting paths on the residual graph.
pub fn min_cost_transport(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len();
    // Nodes: source 0, supplies 1..=n, demands n+1..=2n, sink 2n+1.
    let nodes = 2 * n + 2;
    let (src, sink) = (0, 2 * n + 1);
    let mut cap = vec![vec![0.0f64; nodes]; nodes];
    let mut cost = vec![vec![0.0f64; nodes]; nodes];
    for i in 0..n {
        cap[src][1 + i] = p[i];
        cap[1 + n + i][sink] = q[i];
        for j in 0..n {
            cap[1 + i][1 + n + j] = f64::INFINITY;
            let c = (i as f64 - j as f64).abs();
            cost[1 + i][1 + n + j] = c;
            cost[1 + n + j][1 + i] = -c;
        }
    }
    let mut total = 0.0;
    loop {
        // Bellman-Ford over arcs with residual capacity.
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev = vec![usize::MAX; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u] == f64::INFINITY {
                    continue;
                }
                for v in 0..nodes {
                    if cap[u][v] > 1e-15 && dist[u] + cost[u][v] < dist[v] - 1e-15 {
                        dist[v] = dist[u] + cost[u][v];
                        prev[v] = u;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink] == f64::INFINITY {
            break;
        }
        let mut push = f64::INFINITY;
        let mut v = sink;
        while v != src {
            let u = prev[v];
            push = push.min(cap[u][v]);
            v = u;
        }
        let mut v = sink;
        while v != src {
            let u = prev[v];
            cap[u][v] -= push;
            if cap[v][u].is_finite() {
                cap[v][u] += push;
            }
            v = u;
        }
        total += push * dist[sink];
    }
    total
}

pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.0) })
        .collect();
    if w.iter().sum::<f64>() == 0.0 {
        w[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

fn loss(model: &InrModel<f64>, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    loss_and_grads(model, x.view(), y.view()).unwrap().0
}

/// Largest relative deviation, measured against the gradient's own scale so
/// that entries near zero do not dominate.
pub fn max_relative_error(model: &InrModel<f64>, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let (_, grads) = loss_and_grads(model, x.view(), y.view()).unwrap();
    let analytic = grads.flat();
    let base = model.params_flat();
    let mut probe = model.clone();
    let mut numeric = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + FD_STEP;
        probe.set_params_flat(&p).unwrap();
        let up = loss(&probe, x, y);
        p[i] = base[i] - FD_STEP;
        probe.set_params_flat(&p).unwrap();
        let down = loss(&probe, x, y);
        numeric.push((up - down) / (2.0 * FD_STEP));
    }
    let scale = numeric.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);
    analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs() / (n.abs().max(a.abs()).max(1e-3 * scale)))
        .fold(0.0, f64::max)
}

//! Analytic gradients against central finite differences in f64.

use fresh_core::inr::{init_model, Architecture, EmbeddingConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod oracles;
use oracles::max_relative_error;

const TOL: f64 = 1e-4;
const NETS_PER_FAMILY: u64 = 20;

fn check_family(max_hidden_omega: f64, make: impl Fn(&mut ChaCha8Rng) -> EmbeddingConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..NETS_PER_FAMILY {
        let config = make(&mut rng);
        let arch = Architecture {
            hidden_layers: rng.random_range(1..=2),
            width: rng.random_range(2..=5),
            channels: if rng.random_bool(0.5) { 1 } else { 3 },
            hidden_omega: rng.random_range(1.0..max_hidden_omega),
        };
        let model = init_model::<f64>(config, arch, seed).unwrap();
        let batch = rng.random_range(1..=6);
        let x = Array2::from_shape_fn((batch, 2), |_| rng.random_range(-1.0..1.0));
        let y = Array2::from_shape_fn((batch, arch.channels), |_| rng.random_range(0.0..1.0));
        let err = max_relative_error(&model, &x, &y);
        assert!(err < TOL, "{config} {arch:?} seed {seed}: relative error {err:e}");
    }
}

#[test]
fn siren() {
    check_family(30.0, |rng| EmbeddingConfig::Siren {
        omega0: rng.random_range(1.0..40.0),
    });
}

#[test]
fn fourier() {
    check_family(30.0, |rng| EmbeddingConfig::Fourier {
        sigma: rng.random_range(0.5..5.0),
    });
}

#[test]
fn finer_with_bias() {
    // Finer's phase grows quadratically, so at high frequencies the h^2
    // truncation term of the central difference alone exceeds the tolerance.
    check_family(15.0, |rng| EmbeddingConfig::Finer {
        omega: rng.random_range(1.0..10.0),
        k: rng.random_range(0.1..3.0),
    });
}

#[test]
fn finer_without_bias() {
    check_family(15.0, |rng| EmbeddingConfig::Finer {
        omega: rng.random_range(1.0..10.0),
        k: 0.0,
    });
}

use fresh_core::experiments::{mse, psnr, psnr_from_mse, PSNR_CAP};
use fresh_core::inr::{from_json, init_model, to_json, Architecture, EmbeddingConfig};
use fresh_core::transport::{wasserstein_1d, DiscreteDistribution};
use fresh_core::{make_coord_grid, normalize, resample_square, spectrum_full, Image};
use proptest::prelude::*;

fn square_image(max_side: usize) -> impl Strategy<Value = Image> {
    (2..=max_side, prop_oneof![Just(1usize), Just(3usize)]).prop_flat_map(|(n, c)| {
        prop::collection::vec(-1.0f64..1.0, c * n * n).prop_map(move |d| Image::new(c, n, n, d).unwrap())
    })
}

fn distribution(n: usize) -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec(0.0f64..1.0, n).prop_map(|mut w| {
        w[0] += 1e-3;
        let total: f64 = w.iter().sum();
        DiscreteDistribution::new(w.iter().map(|v| v / total).collect()).unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_transpose_invariant(img in square_image(12)) {
        let a = spectrum_full(&img).unwrap();
        let b = spectrum_full(&img.transposed()).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            prop_assert!(close(*x, *y, 1e-9));
        }
    }

    #[test]
    fn spectrum_is_absolutely_homogeneous(img in square_image(12), alpha in -8.0f64..8.0) {
        let a = spectrum_full(&img).unwrap();
        let b = spectrum_full(&img.scaled(alpha)).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            prop_assert!(close(alpha.abs() * x, *y, 1e-9));
        }
    }

    #[test]
    fn spectrum_ignores_constant_offset(img in square_image(12), offset in -3.0f64..3.0) {
        let a = spectrum_full(&img).unwrap();
        let b = spectrum_full(&img.map(|v| v + offset)).unwrap();
        let scale = a.entries().iter().cloned().fold(1.0, f64::max);
        for (x, y) in a.entries().iter().zip(b.entries()) {
            prop_assert!((x - y).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn normalized_spectrum_sums_to_one(img in square_image(12)) {
        if let Ok(s) = normalize(&spectrum_full(&img).unwrap()) {
            let total: f64 = s.entries().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(s.entries().iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn wasserstein_is_a_metric(
        (p, q, r) in (1usize..=16).prop_flat_map(|n| (distribution(n), distribution(n), distribution(n)))
    ) {
        let pq = wasserstein_1d(&p, &q).unwrap();
        let qp = wasserstein_1d(&q, &p).unwrap();
        let pr = wasserstein_1d(&p, &r).unwrap();
        let rq = wasserstein_1d(&r, &q).unwrap();
        prop_assert!(pq >= 0.0);
        prop_assert_eq!(wasserstein_1d(&p, &p).unwrap(), 0.0);
        prop_assert!((pq - qp).abs() < 1e-12);
        prop_assert!(pq <= pr + rq + 1e-12);
        prop_assert!(pq <= (p.len() - 1) as f64 + 1e-12);
    }

    #[test]
    fn psnr_follows_mse(a in square_image(8), shift in 0.001f64..0.5) {
        let b = a.map(|v| v + shift);
        let m = mse(&a, &b).unwrap();
        prop_assert_eq!(psnr(&a, &b).unwrap(), psnr_from_mse(m));
        prop_assert!(close(psnr_from_mse(m), -10.0 * m.log10(), 1e-12));
        prop_assert_eq!(psnr(&a, &a).unwrap(), PSNR_CAP);
    }

    #[test]
    fn resample_to_own_size_is_identity(img in square_image(10)) {
        prop_assert_eq!(resample_square(&img, img.height()).unwrap(), img);
    }

    #[test]
    fn coordinate_grid_spans_unit_square(h in 2usize..40, w in 2usize..40) {
        let g = make_coord_grid(h, w);
        prop_assert_eq!(g.len(), h * w);
        prop_assert_eq!(g.coords()[0], [-1.0, -1.0]);
        prop_assert_eq!(g.coords()[h * w - 1], [1.0, 1.0]);
        prop_assert!(g.coords().iter().all(|c| c[0].abs() <= 1.0 && c[1].abs() <= 1.0));
    }

    #[test]
    fn checkpoint_round_trip(omega in 1.0f64..100.0, k in 0.0f64..3.0, seed in 0u64..1000, width in 1usize..6) {
        let arch = Architecture { hidden_layers: 1, width, channels: 3, hidden_omega: 30.0 };
        let model = init_model::<f32>(EmbeddingConfig::Finer { omega, k }, arch, seed).unwrap();
        let back = from_json::<f32>(&to_json(&model).unwrap()).unwrap();
        prop_assert_eq!(back, model);
    }

    #[test]
    fn init_is_seed_deterministic(omega0 in 1.0f64..200.0, seed in 0u64..u64::MAX) {
        let arch = Architecture { hidden_layers: 1, width: 4, channels: 1, hidden_omega: 30.0 };
        let cfg = EmbeddingConfig::Siren { omega0 };
        prop_assert_eq!(init_model::<f64>(cfg, arch, seed).unwrap(), init_model::<f64>(cfg, arch, seed).unwrap());
    }
}

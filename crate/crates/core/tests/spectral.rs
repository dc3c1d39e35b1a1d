mod common;

use common::{random_state, rng};
use dnls_core::spectral::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn embedding_inequality_holds() {
    let mut rng = rng(11);
    for &(s, p) in &[(0.5, 4.0), (0.3, 4.0), (0.2, 3.0), (1.0, 6.0)] {
        let params = FLParams::new(s, p).unwrap();
        assert_eq!(params.regime(), Regime::Main);
        let z = embedding_constant(&params).unwrap();
        for _ in 0..1000 {
            let k_max = rng.random_range(1..=48);
            let decay: f64 = rng.random_range(0.0..2.0);
            let raw = random_state(&mut rng, k_max, Representation::Physical);
            let state = raw.map_modes(|k, c| c * (k.unsigned_abs() as f64).powf(-decay));
            assert!(l2_norm(&state) <= z * fl_norm(&state, &params) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn young_constant_decreases_in_s() {
    for &p in &[1.5, 2.0, 3.0, 4.0, 8.0] {
        let values: Vec<f64> = (0..12)
            .map(|i| young_constant(&FLParams::new(-1.0 / p + 0.05 + 0.1 * i as f64, p).unwrap()).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "p = {p}: {values:?}");
    }
}

#[test]
fn l2_constant_value() {
    // Z_{0,2} = sqrt(2 ζ(2)) = π / sqrt(3)
    let z = young_constant(&FLParams::l2()).unwrap();
    assert!((z - 1.813_799_364_234_217_8).abs() < 1e-12);
}

#[test]
fn grid_round_trip_up_to_128() {
    let mut rng = rng(3);
    for &k_max in &[1, 7, 32, 64, 128] {
        let v = random_state(&mut rng, k_max, Representation::Physical);
        let field = grid_transform(&v, oversampled_grid_size(k_max)).unwrap();
        let back = grid_to_state(&field, k_max, &GridOptions::default()).unwrap();
        assert!(l2_norm(&back.sub(&v)) <= 1e-12 * l2_norm(&v));
    }
}

fn state_strategy() -> impl Strategy<Value = SpectralState> {
    (1usize..12).prop_flat_map(|k_max| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * k_max).prop_map(move |pairs| {
            let modes: Vec<_> = fixed_order(k_max)
                .zip(pairs)
                .map(|(k, (re, im))| (k, Complex64::new(re, im)))
                .collect();
            SpectralState::from_modes(modes, k_max, 0.37, Representation::Physical).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn representation_round_trip(u in state_strategy()) {
        let back = u.to_interaction().to_physical();
        prop_assert!(back.sub(&u).max_abs() <= 4.0 * f64::EPSILON * u.max_abs().max(1e-300));
        prop_assert_eq!(back.repr(), Representation::Physical);
    }

    #[test]
    fn fl_norm_is_a_norm(u in state_strategy(), scale in -3.0f64..3.0, s in -0.4f64..1.5, p in 1.0f64..6.0) {
        let params = FLParams { s, p };
        let w = u.map_modes(|k, c| c * Complex64::new(0.3, k as f64 * 0.1));
        let scaled = fl_norm(&u.scaled(scale.into()), &params);
        prop_assert!((scaled - scale.abs() * fl_norm(&u, &params)).abs() <= 1e-12 * scaled.max(1.0));
        prop_assert!(fl_norm(&u.add(&w), &params) <= (fl_norm(&u, &params) + fl_norm(&w, &params)) * (1.0 + 1e-12));
    }

    #[test]
    fn primitive_inverts_derivative(u in state_strategy()) {
        let back = derivative(&primitive(&u));
        prop_assert!(back.sub(&u).max_abs() <= 4.0 * f64::EPSILON * u.max_abs());
    }

    #[test]
    fn mean_square_agrees_across_representations(u in state_strategy()) {
        let m = mean_square(&u).unwrap();
        let mi = mean_square_interaction(&u.to_interaction()).unwrap();
        prop_assert!((m - mi).norm() <= 1e-13 * m.norm().max(1.0));
    }

    #[test]
    fn json_round_trip(u in state_strategy()) {
        let text = serde_json::to_string(&u).unwrap();
        let back: SpectralState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, u);
    }
}

#![allow(dead_code)]

use dnls_core::spectral::{fixed_order, fl_norm, FLParams, Representation, SpectralState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(rng: &mut ChaCha8Rng, k_max: usize, repr: Representation) -> SpectralState {
    let modes: Vec<_> = fixed_order(k_max)
        .map(|k| {
            (
                k,
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    SpectralState::from_modes(modes, k_max, 0.0, repr).unwrap()
}

/// Random state rescaled to the given norm.
pub fn random_with_norm(rng: &mut ChaCha8Rng, k_max: usize, params: &FLParams, norm: f64) -> SpectralState {
    let s = random_state(rng, k_max, Representation::Physical);
    let scale = norm / fl_norm(&s, params);
    s.scaled(scale.into())
}

/// Modes `±1, ±2` each of amplitude `ε/2`, so that `‖φ‖_{ℓ²} = ε`.
pub fn two_cosine(eps: f64, k_max: usize) -> SpectralState {
    let a = Complex64::new(0.5 * eps, 0.0);
    SpectralState::from_modes([(1, a), (-1, a), (2, a), (-2, a)], k_max, 0.0, Representation::Physical).unwrap()
}

pub fn cosine(eps: f64, k_max: usize) -> SpectralState {
    let a = Complex64::new(eps, 0.0);
    SpectralState::from_modes([(1, a), (-1, a)], k_max, 0.0, Representation::Physical).unwrap()
}

/// `J_n(x)` from its power series.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut total = 0.0;
    for m in 0..40 {
        total += term;
        term *= -(0.25 * x * x) / ((m + 1) as f64 * (m + 1 + n) as f64);
    }
    total
}

pub fn ell2(s: &SpectralState) -> f64 {
    s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

use dnls_core::spectral::{fixed_order, fl_norm, FLParams, Representation, SpectralState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::InitialData;
use crate::error::{CliError, Context};

/// Physical initial data on `|k| <= K` at `t = 0`.
pub fn initial_state(data: &InitialData, k_max: usize, params: &FLParams) -> Result<SpectralState, CliError> {
    let phys = Representation::Physical;
    match data {
        InitialData::SingleMode { mode, re, im } => {
            SpectralState::from_modes([(*mode, Complex64::new(*re, *im))], k_max, 0.0, phys).context("single-mode data")
        }
        InitialData::TwoCosine { eps } => {
            let a = Complex64::new(0.5 * eps, 0.0);
            SpectralState::from_modes([(1, a), (-1, a), (2, a), (-2, a)], k_max, 0.0, phys).context("two-cosine data")
        }
        InitialData::RandomSeeded { seed, norm, decay } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let modes: Vec<_> = fixed_order(k_max)
                .map(|k| {
                    let damp = (k.unsigned_abs() as f64).powf(-decay);
                    let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    (k, damp * z)
                })
                .collect();
            let raw = SpectralState::from_modes(modes, k_max, 0.0, phys).context("random data")?;
            let current = fl_norm(&raw, params);
            let scale = if *norm == 0.0 || current == 0.0 {
                0.0
            } else {
                norm / current
            };
            Ok(raw.scaled(scale.into()))
        }
        InitialData::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            let state: SpectralState = serde_json::from_str(&text).map_err(|e| CliError::config("data.path", e))?;
            if state.k_max() > k_max {
                return Err(CliError::field(
                    "data.path",
                    format!("file has K = {} above the configured K = {k_max}", state.k_max()),
                ));
            }
            Ok(state.to_physical().resized(k_max).with_time(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_data_is_reproducible() {
        let data = InitialData::RandomSeeded {
            seed: 7,
            norm: 0.1,
            decay: 1.0,
        };
        let a = initial_state(&data, 12, &FLParams::l2()).unwrap();
        let b = initial_state(&data, 12, &FLParams::l2()).unwrap();
        assert_eq!(a, b);
        assert!((fl_norm(&a, &FLParams::l2()) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn two_cosine_norm() {
        let phi = initial_state(&InitialData::TwoCosine { eps: 0.05 }, 8, &FLParams::l2()).unwrap();
        assert!((fl_norm(&phi, &FLParams::l2()) - 0.05).abs() < 1e-16);
    }
}

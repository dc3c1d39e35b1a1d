use num_complex::Complex64;

use super::state::{dispersion_phase, Representation, SpectralState};
use crate::error::{Error, Result};

/// Mean-zero primitive `J(φ)_k = φ_k / (ik)`.
pub fn primitive(state: &SpectralState) -> SpectralState {
    state.map_modes(|k, c| c / Complex64::new(0.0, k as f64))
}

/// Spectral derivative `(∂_x f)_k = ik f_k`.
pub fn derivative(state: &SpectralState) -> SpectralState {
    state.map_modes(|k, c| c * Complex64::new(0.0, k as f64))
}

/// `M(u) = P₀[u²] = Σ_m u_m u_{-m}`; not the squared `L²` norm.
pub fn mean_square(u: &SpectralState) -> Result<Complex64> {
    if u.repr() != Representation::Physical {
        return Err(Error::InvalidArgument(
            "mean_square expects a physical-representation state".into(),
        ));
    }
    Ok(u.modes_fixed_order().map(|(m, c)| c * u.get(-m)).sum())
}

/// `M(u)` evaluated from the interaction variable: `Σ_m e^{-2im²t} v_m v_{-m}`.
pub fn mean_square_interaction(v: &SpectralState) -> Result<Complex64> {
    if v.repr() != Representation::Interaction {
        return Err(Error::InvalidArgument(
            "mean_square_interaction expects an interaction-representation state".into(),
        ));
    }
    let t = v.time();
    Ok(v.modes_fixed_order()
        .map(|(m, c)| dispersion_phase(m, -2.0 * t) * c * v.get(-m))
        .sum())
}

/// `M(u)` from either representation.
pub fn mean_square_any(state: &SpectralState) -> Complex64 {
    match state.repr() {
        Representation::Physical => mean_square(state),
        Representation::Interaction => mean_square_interaction(state),
    }
    .expect("representation matched")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::constants::young_constant;
    use crate::spectral::norms::{fl_norm, FLParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha8Rng, k_max: usize, t: f64) -> SpectralState {
        let modes: Vec<_> = (1..=k_max as i64)
            .flat_map(|m| [-m, m])
            .map(|k| {
                (
                    k,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) / (k * k) as f64,
                )
            })
            .collect();
        SpectralState::from_modes(modes, k_max, t, Representation::Physical).unwrap()
    }

    #[test]
    fn primitive_of_cosine() {
        let phi =
            SpectralState::from_modes([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))], 4, 0.0, Representation::Physical).unwrap();
        let j = primitive(&phi);
        assert_eq!(j.get(1), c(0.0, -1.0));
        assert_eq!(j.get(-1), c(0.0, 1.0));
        assert!(primitive(&SpectralState::zeros(4, 0.0, Representation::Physical)).is_zero());
    }

    #[test]
    fn derivative_inverts_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_state(&mut rng, 12, 0.0);
        let back = derivative(&primitive(&phi));
        for (a, b) in phi.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() <= 4.0 * f64::EPSILON * a.norm());
        }
    }

    #[test]
    fn primitive_l1_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for params in [
            FLParams::l2(),
            FLParams::new(0.5, 4.0).unwrap(),
            FLParams::new(0.0, 1.0).unwrap(),
        ] {
            let z = young_constant(&params).unwrap();
            for _ in 0..100 {
                let phi = random_state(&mut rng, 10, 0.0);
                let l1 = fl_norm(&primitive(&phi), &FLParams::new(0.0, 1.0).unwrap());
                assert!(l1 <= z * fl_norm(&phi, &params) * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn mean_square_examples() {
        let cos2 =
            SpectralState::from_modes([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))], 4, 0.0, Representation::Physical).unwrap();
        assert_eq!(mean_square(&cos2).unwrap(), c(2.0, 0.0));
        let sin2 = SpectralState::from_modes([(1, c(1.0, 0.0)), (-1, c(-1.0, 0.0))], 4, 0.0, Representation::Physical)
            .unwrap();
        assert_eq!(mean_square(&sin2).unwrap(), c(-2.0, 0.0));
    }

    #[test]
    fn mean_square_dual_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = rng.random_range(0.0..3.0);
            let u = random_state(&mut rng, 9, t);
            let a = mean_square(&u).unwrap();
            let b = mean_square_interaction(&u.to_interaction()).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
        assert!(mean_square(&SpectralState::zeros(2, 0.0, Representation::Interaction)).is_err());
    }
}

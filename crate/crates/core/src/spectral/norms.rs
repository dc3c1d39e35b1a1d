use serde::{Deserialize, Serialize};

use super::state::SpectralState;
use crate::error::{Error, Result};

/// Parameter regimes of the Fourier-Lebesgue pair `(s, p)`.
///
/// Classification is by priority: `Main`, then `L2`, then `ConstantsOnly`;
/// anything else is `Outside`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `s > 1/2 - 1/p` and `p > 2`.
    Main,
    /// `s >= 0` and `p = 2`.
    L2,
    /// `s > -1/p, p > 1`, or `p = 1, s >= -1`: the constant `Z_{s,p}` exists.
    ConstantsOnly,
    Outside,
}

impl Regime {
    /// Regimes in which the small-data theory applies.
    pub fn is_well_posed(self) -> bool {
        matches!(self, Regime::Main | Regime::L2)
    }

    pub fn has_young_constant(self) -> bool {
        !matches!(self, Regime::Outside)
    }
}

/// A regularity/integrability pair `(s, p)`; `p` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FLParams {
    pub s: f64,
    pub p: f64,
}

impl FLParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !s.is_finite() || p.is_nan() || p < 1.0 {
            return Err(Error::DomainError(format!("invalid (s, p) = ({s}, {p})")));
        }
        Ok(Self { s, p })
    }

    pub fn l2() -> Self {
        Self { s: 0.0, p: 2.0 }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn inv_p(&self) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }

    /// Hölder conjugate `p'`.
    pub fn conjugate(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn regime(&self) -> Regime {
        let (s, p) = (self.s, self.p);
        let inv_p = self.inv_p();
        if p > 2.0 && s > 0.5 - inv_p {
            Regime::Main
        } else if p == 2.0 && s >= 0.0 {
            Regime::L2
        } else if (p > 1.0 && s > -inv_p) || (p == 1.0 && s >= -1.0) {
            Regime::ConstantsOnly
        } else {
            Regime::Outside
        }
    }
}

/// Pairwise (cascade) summation with a fixed split, for reproducible totals.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 8;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `‖ |k|^s c_k ‖_{ℓ^p}` over `1 <= |k| <= K`; `p = ∞` gives the sup.
pub fn fl_norm(state: &SpectralState, params: &FLParams) -> f64 {
    let weighted: Vec<f64> = state
        .modes_fixed_order()
        .map(|(k, c)| (k.unsigned_abs() as f64).powf(params.s) * c.norm())
        .collect();
    if params.p.is_infinite() {
        return weighted.iter().copied().fold(0.0, f64::max);
    }
    if params.p == 2.0 {
        let sq: Vec<f64> = weighted.iter().map(|w| w * w).collect();
        return pairwise_sum(&sq).sqrt();
    }
    if params.p == 1.0 {
        return pairwise_sum(&weighted);
    }
    let powered: Vec<f64> = weighted.iter().map(|w| w.powf(params.p)).collect();
    pairwise_sum(&powered).powf(1.0 / params.p)
}

/// `ℓ²` norm of the coefficients, i.e. `(1/2π ∫|u|²)^{1/2}`.
pub fn l2_norm(state: &SpectralState) -> f64 {
    fl_norm(state, &FLParams::l2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::state::Representation;
    use num_complex::Complex64;

    #[test]
    fn regime_table() {
        let r = |s, p| FLParams::new(s, p).unwrap().regime();
        assert_eq!(r(0.0, 2.0), Regime::L2);
        assert_eq!(r(0.5, 4.0), Regime::Main);
        assert_eq!(r(0.25, 4.0), Regime::ConstantsOnly);
        assert_eq!(r(-0.5, 2.0), Regime::Outside);
        assert_eq!(r(-0.4, 2.0), Regime::ConstantsOnly);
        assert_eq!(r(0.0, 1.0), Regime::ConstantsOnly);
        assert_eq!(r(-1.0, 1.0), Regime::ConstantsOnly);
        assert_eq!(r(-1.5, 1.0), Regime::Outside);
        assert_eq!(r(0.6, f64::INFINITY), Regime::Main);
        assert!(FLParams::new(0.0, 0.5).is_err());
    }

    #[test]
    fn two_mode_norm() {
        let s = SpectralState::from_modes(
            [(1, Complex64::new(1.0, 0.0)), (-2, Complex64::new(1.0, 0.0))],
            4,
            0.0,
            Representation::Physical,
        )
        .unwrap();
        let n = fl_norm(&s, &FLParams::new(1.0, 2.0).unwrap());
        assert!((n - 5f64.sqrt()).abs() < 1e-15);
        let single =
            SpectralState::from_modes([(1, Complex64::new(1.0, 0.0))], 4, 0.0, Representation::Physical).unwrap();
        assert_eq!(l2_norm(&single), 1.0);
        assert_eq!(
            fl_norm(&SpectralState::zeros(4, 0.0, Representation::Physical), &FLParams::l2()),
            0.0
        );
        let sup = fl_norm(&s, &FLParams::new(1.0, f64::INFINITY).unwrap());
        assert_eq!(sup, 2.0);
    }

    #[test]
    fn zeta_four_partial_sum() {
        // Σ_{k=1}^{1000} k^{-4} plus the tail bracket [∫_{1001}^∞, ∫_{1000}^∞] of x^{-4}.
        let k_max = 1000;
        let s = SpectralState::from_modes(
            (1..=k_max as i64).map(|k| (k, Complex64::new(1.0 / (k * k) as f64, 0.0))),
            k_max,
            0.0,
            Representation::Physical,
        )
        .unwrap();
        let n = l2_norm(&s);
        let lower_tail = 1.0 / (3.0 * 1001f64.powi(3));
        let upper_tail = 1.0 / (3.0 * 1000f64.powi(3));
        let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
        assert!(n * n + lower_tail <= zeta4 + 1e-14);
        assert!(n * n + upper_tail >= zeta4 - 1e-14);
        assert!((n - 1.0403).abs() < 1e-4);
    }

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), xs.iter().sum::<f64>());
    }
}

//! Pointwise and Fourier-Lebesgue bounds on the normal form terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{embedding_constant, young_constant, FLParams};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Multilinear growth factor: `1` for `s <= 0`, `n^s` otherwise.
pub fn growth_factor(s: f64, n: usize) -> f64 {
    if s <= 0.0 {
        1.0
    } else {
        (n as f64).powf(s)
    }
}

/// `sup_n n C_s(n) / 2^{n-1}`, scanned until the sequence has decreased
/// for ten consecutive `n`.
pub fn series_constant(s: f64) -> f64 {
    let term = |n: usize| n as f64 * growth_factor(s, n) / 2f64.powi(n as i32 - 1);
    let mut best = term(1);
    let mut prev = best;
    let mut decreasing = 0;
    let mut n = 2;
    while decreasing < 10 {
        let x = term(n);
        best = best.max(x);
        if x < prev {
            decreasing += 1;
        } else {
            decreasing = 0;
        }
        prev = x;
        n += 1;
    }
    best
}

/// `|I^n_k| <= |k| Z^{n-2} C₀^n / (2^{n-1} (n-2)!)` with `Z = Z_{0,2}`.
pub fn remainder_bound(k: i64, n: usize, z: f64, c0: f64) -> f64 {
    assert!(n >= 2);
    k.unsigned_abs() as f64 * z.powi(n as i32 - 2) * c0.powi(n as i32) / (2f64.powi(n as i32 - 1) * factorial(n - 2))
}

/// `|N^n_k| <= Z^{n-1} C₀^n / (2^{n-1} (n-1)!)`.
pub fn boundary_bound(n: usize, z: f64, c0: f64) -> f64 {
    assert!(n >= 1);
    z.powi(n as i32 - 1) * c0.powi(n as i32) / (2f64.powi(n as i32 - 1) * factorial(n - 1))
}

/// `|R^n_k| <= Z^{n-2} C₀^{n+1} / (2^n (n-2)!)`.
pub fn resonant_bound(n: usize, z: f64, c0: f64) -> f64 {
    assert!(n >= 2);
    z.powi(n as i32 - 2) * c0.powi(n as i32 + 1) / (2f64.powi(n as i32) * factorial(n - 2))
}

/// `Σ_{n > n_max}` of [`boundary_bound`], with the geometric remainder once
/// the term ratio `Z C₀ / (2n)` falls below one half.
pub fn boundary_tail(n_max: usize, z: f64, c0: f64) -> f64 {
    if c0 == 0.0 {
        return 0.0;
    }
    let mut n = n_max + 1;
    let mut term = boundary_bound(n, z, c0);
    let mut total = 0.0;
    loop {
        total += term;
        let ratio = z * c0 / (2.0 * n as f64);
        if ratio < 0.5 {
            return total + term * ratio / (1.0 - ratio);
        }
        term *= ratio;
        n += 1;
    }
}

fn check_fl(params: &FLParams) -> Result<f64> {
    young_constant(params)
}

/// Right side of `‖N^n(v)‖ <= C_s(n) Z^{n-1} / (2^{n-1}(n-1)!) ‖v‖^n`.
pub fn fl_boundary_bound(n: usize, params: &FLParams, norm: f64) -> Result<f64> {
    let z = check_fl(params)?;
    Ok(
        growth_factor(params.s, n) * z.powi(n as i32 - 1) / (2f64.powi(n as i32 - 1) * factorial(n - 1))
            * norm.powi(n as i32),
    )
}

/// Right side of the Lipschitz estimate
/// `‖N^n(v) - N^n(w)‖ <= C_s(n) n Z^{n-1} / (2^{n-1}(n-1)!) (‖v‖ + ‖w‖)^{n-1} ‖v - w‖`.
pub fn fl_lipschitz_bound(n: usize, params: &FLParams, norm_v: f64, norm_w: f64, norm_diff: f64) -> Result<f64> {
    let z = check_fl(params)?;
    Ok(
        growth_factor(params.s, n) * n as f64 * z.powi(n as i32 - 1) / (2f64.powi(n as i32 - 1) * factorial(n - 1))
            * (norm_v + norm_w).powi(n as i32 - 1)
            * norm_diff,
    )
}

/// Small-data constants of the contraction argument for `(s, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionConstants {
    pub young: f64,
    pub embedding: f64,
    pub series: f64,
    /// Largest `‖φ‖` with `A_s (e^{4 Z ‖φ‖} - 1) <= 1/4`.
    pub smallness: f64,
    /// `z = 1` taken for `p = 2`.
    pub embedding_extended: bool,
}

impl ContractionConstants {
    pub fn new(params: &FLParams) -> Result<Self> {
        let regime = params.regime();
        if !regime.is_well_posed() {
            return Err(Error::DomainError(format!(
                "(s, p) = ({}, {}) is outside the small-data regime",
                params.s, params.p
            )));
        }
        let young = young_constant(params)?;
        let embedding = embedding_constant(params)?;
        let series = series_constant(params.s);
        let smallness = (1.0 + 0.25 / series).ln() / (4.0 * young);
        Ok(Self {
            young,
            embedding,
            series,
            smallness,
            embedding_extended: params.p == 2.0,
        })
    }

    /// Guaranteed existence time for data of norm `norm`, using `R = 2‖φ‖`.
    pub fn horizon(&self, norm: f64) -> f64 {
        let r = 2.0 * norm;
        if r == 0.0 {
            return f64::INFINITY;
        }
        let e = (self.young * r).exp();
        let base = self.series * self.embedding.powi(2) * r * r * e;
        (1.0 / (2.0 * base)).min(1.0 / (base * (2.0 + e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn growth_and_series_constants() {
        assert_eq!(growth_factor(-0.3, 5), 1.0);
        assert_eq!(growth_factor(0.0, 5), 1.0);
        assert!((growth_factor(0.5, 4) - 2.0).abs() < 1e-15);
        assert_eq!(series_constant(0.0), 1.0);
        // n^{3/2} / 2^{n-1} peaks at n = 2 or 3: 2^{1.5}/2 = 1.414, 3^{1.5}/4 = 1.299
        assert!((series_constant(0.5) - 2f64.powf(1.5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn smallness_threshold_l2() {
        let c = ContractionConstants::new(&FLParams::l2()).unwrap();
        let expect = 1.25f64.ln() / (4.0 * PI / 3f64.sqrt());
        assert!((c.smallness - expect).abs() < 1e-14);
        assert!((c.smallness - 0.0308).abs() < 1e-3);
        assert!(c.embedding_extended);
        assert!(c.horizon(0.02) > 1.0);
        assert!(ContractionConstants::new(&FLParams::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn tail_dominates_partial_sums() {
        let z = PI / 3f64.sqrt();
        let tail = boundary_tail(8, z, 0.05);
        let brute: f64 = (9..200).map(|n| boundary_bound(n, z, 0.05)).sum();
        assert!(tail >= brute && tail < 1e-12);
        assert!(tail <= brute * 1.01);
        assert_eq!(boundary_tail(3, z, 0.0), 0.0);
        let big = boundary_tail(2, 5.0, 3.0);
        let brute: f64 = (3..120).map(|n| boundary_bound(n, 5.0, 3.0)).sum();
        assert!(big >= brute * (1.0 - 1e-12));
    }
}

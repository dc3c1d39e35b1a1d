//! The boundary terms `N^n`, the remainders `I^n` and the resonant
//! corrections `R^n` of the iterated differentiation by parts.
//!
//! With `b_k = e^{-ik²t} v_k / k = u_k / k`, every term is a convolution
//! power of `b` weighted by `c_n k e^{ik²t}`, `c_n = (-1)^n / (2^{n-1} n!)`.
//! The fast path forms those powers pointwise on a grid wide enough for the
//! full support `|k| <= nK`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tuple::{for_each_tuple, ModTuple};
use crate::error::{Error, Result};
use crate::spectral::grid::{alias_free_size, analyze, extract_modes, synthesize};
use crate::spectral::{dispersion_phase, Representation, SpectralState};

/// Largest arity accepted by the direct tuple sum.
pub const DIRECT_MAX_ARITY: usize = 5;
/// Largest truncation accepted by the direct tuple sum.
pub const DIRECT_MAX_K: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Brute-force sum over frequency tuples.
    Direct,
    /// Convolution powers on a zero-padded grid.
    Fast,
}

/// `(-1)^n / (2^{n-1} n!)`.
pub fn term_coefficient(n: usize) -> f64 {
    let mut c = 1.0;
    for j in 1..=n {
        c /= j as f64;
    }
    c /= 2f64.powi(n as i32 - 1);
    if n % 2 == 1 {
        -c
    } else {
        c
    }
}

fn require_interaction(v: &SpectralState) -> Result<()> {
    if v.repr() != Representation::Interaction {
        return Err(Error::InvalidArgument(
            "normal form terms take an interaction state".into(),
        ));
    }
    Ok(())
}

fn check_budget(n: usize, k_max: usize) -> Result<()> {
    if n > DIRECT_MAX_ARITY || k_max > DIRECT_MAX_K {
        return Err(Error::ComplexityBudget { n, k_max });
    }
    Ok(())
}

/// `b_k = e^{-ik²t} v_k / k`.
fn scaled_profile(v: &SpectralState, t: f64) -> SpectralState {
    v.map_modes(|k, c| dispersion_phase(k, -t) * c / k as f64)
}

fn finish(
    spectrum: &[Complex64],
    n: usize,
    k_out: usize,
    t: f64,
    f: impl Fn(i64, Complex64) -> Complex64,
) -> Result<SpectralState> {
    let coeff = term_coefficient(n);
    let mut out = extract_modes(spectrum, k_out, t, Representation::Interaction)?;
    out = out.map_modes(|k, c| coeff * k as f64 * dispersion_phase(k, t) * f(k, c));
    Ok(out)
}

fn pointwise_power(samples: &[Complex64], n: usize) -> Vec<Complex64> {
    samples.iter().map(|z| z.powu(n as u32)).collect()
}

/// `N^n(t)(v)` on `|k| <= k_out` (default `nK`). `N¹ = -v`.
pub fn boundary_term(v: &SpectralState, t: f64, n: usize, method: Method) -> Result<SpectralState> {
    boundary_term_to(v, t, n, method, n * v.k_max())
}

pub fn boundary_term_to(v: &SpectralState, t: f64, n: usize, method: Method, k_out: usize) -> Result<SpectralState> {
    require_interaction(v)?;
    if n == 0 {
        return Err(Error::InvalidArgument("arity must be >= 1".into()));
    }
    if n == 1 {
        return Ok(v.scaled(Complex64::new(-1.0, 0.0)).resized(k_out).with_time(t));
    }
    match method {
        Method::Direct => {
            check_budget(n, v.k_max())?;
            direct_sum(v, t, n, k_out, |_| Complex64::new(1.0, 0.0))
        }
        Method::Fast => {
            let grid = alias_free_size(n * v.k_max().max(k_out));
            let b = synthesize(&scaled_profile(v, t), grid);
            let spectrum = analyze(&pointwise_power(&b, n));
            finish(&spectrum, n, k_out, t, |_, c| c)
        }
    }
}

/// `I^n(t)(v)` on `|k| <= k_out` (default `nK`); requires `n >= 2`.
pub fn remainder_term(v: &SpectralState, t: f64, n: usize, method: Method) -> Result<SpectralState> {
    remainder_term_to(v, t, n, method, n * v.k_max())
}

pub fn remainder_term_to(v: &SpectralState, t: f64, n: usize, method: Method, k_out: usize) -> Result<SpectralState> {
    require_interaction(v)?;
    if n < 2 {
        return Err(Error::InvalidArgument("remainder terms start at arity 2".into()));
    }
    match method {
        Method::Direct => {
            check_budget(n, v.k_max())?;
            direct_sum(v, t, n, k_out, |phi| Complex64::new(0.0, phi as f64))
        }
        Method::Fast => {
            let grid = alias_free_size(n * v.k_max().max(k_out));
            let profile = scaled_profile(v, t);
            let b = synthesize(&profile, grid);
            let d = synthesize(&profile.map_modes(|k, c| (k * k) as f64 * c), grid);
            let power = analyze(&pointwise_power(&b, n));
            let mixed: Vec<Complex64> = b.iter().zip(&d).map(|(bz, dz)| dz * bz.powu(n as u32 - 1)).collect();
            let mixed = analyze(&mixed);
            let p = extract_modes(&power, k_out, t, Representation::Interaction)?;
            let q = extract_modes(&mixed, k_out, t, Representation::Interaction)?;
            let coeff = term_coefficient(n);
            Ok(p.map_modes(|k, pk| {
                let bracket = Complex64::new(0.0, (k * k) as f64) * pk - Complex64::new(0.0, n as f64) * q.get(k);
                coeff * k as f64 * dispersion_phase(k, t) * bracket
            }))
        }
    }
}

/// `Σ_m e^{-2im²t} v_m v_{-m}`, the mean of `u²` at time `t`.
pub fn mean_square_at(v: &SpectralState, t: f64) -> Complex64 {
    v.modes_fixed_order()
        .map(|(m, c)| dispersion_phase(m, -2.0 * t) * c * v.get(-m))
        .sum()
}

/// `R^n(t)(v) = (-i/4) M(u) N^{n-1}(t)(v)`, `n >= 2`, on `|k| <= (n-1)K`.
pub fn resonant_term(v: &SpectralState, t: f64, n: usize) -> Result<SpectralState> {
    require_interaction(v)?;
    if n < 2 {
        return Err(Error::InvalidArgument("resonant terms start at arity 2".into()));
    }
    let m = mean_square_at(v, t);
    let prev = boundary_term(v, t, n - 1, Method::Fast)?;
    Ok(prev.scaled(Complex64::new(0.0, -0.25) * m))
}

fn direct_sum(
    v: &SpectralState,
    t: f64,
    n: usize,
    k_out: usize,
    weight: impl Fn(i64) -> Complex64,
) -> Result<SpectralState> {
    let coeff = term_coefficient(n);
    let mut out = SpectralState::zeros(k_out, t, Representation::Interaction);
    for k in crate::spectral::fixed_order(k_out) {
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_tuple(n, v.k_max(), k, |ks| {
            let phi = ModTuple::new(ks.to_vec()).expect("nonzero by construction").phase();
            let mut prod = weight(phi) * Complex64::from_polar(1.0, phi as f64 * t);
            for &kj in ks {
                prod *= v.get(kj) / kj as f64;
            }
            acc += prod;
        });
        out.set(k, coeff * k as f64 * acc)?;
    }
    Ok(out)
}

/// Direct sum restricted to resonant tuples (`Φ_n = 0`) with weight `iΦ_n`.
pub fn resonant_part_of_remainder(v: &SpectralState, t: f64, n: usize) -> Result<SpectralState> {
    require_interaction(v)?;
    check_budget(n, v.k_max())?;
    direct_sum(v, t, n, n * v.k_max(), |phi| {
        if phi == 0 {
            Complex64::new(0.0, phi as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Σ_{n=1}^{n_max} N^n(t)(v)` on `|k| <= k_out` with one transform.
pub fn boundary_sum(v: &SpectralState, t: f64, n_max: usize, k_out: usize) -> Result<SpectralState> {
    require_interaction(v)?;
    let grid = alias_free_size(n_max.max(1) * v.k_max().max(k_out));
    let b = synthesize(&scaled_profile(v, t), grid);
    let weights: Vec<f64> = (0..=n_max)
        .map(|n| if n == 0 { 0.0 } else { term_coefficient(n) })
        .collect();
    // Horner in b: Σ_n c_n b^n
    let sum: Vec<Complex64> = b
        .iter()
        .map(|&z| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &w in weights.iter().rev() {
                acc = acc * z + w;
            }
            acc
        })
        .collect();
    let spectrum = analyze(&sum);
    let mut out = extract_modes(&spectrum, k_out, t, Representation::Interaction)?;
    out = out.map_modes(|k, c| k as f64 * dispersion_phase(k, t) * c);
    Ok(out)
}

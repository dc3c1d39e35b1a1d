//! The Riemann zeta function on `(1, ∞)` and the constants built from it.
//!
//! `Z_{s,p} = ‖ |k|^{-(s+1)} ‖_{ℓ^{p'}(ℤ₀)} = [2 ζ((s+1)p')]^{1/p'}` bounds
//! `Σ |c_k|/|k| <= Z_{s,p} ‖c‖_{FL^{s,p}}`, and `z_{s,p} = Z_{s-1, 2p/(p+2)}`
//! is the `FL^{s,p} ⊂ L²` embedding constant.

use super::norms::{FLParams, Regime};
use crate::error::{Error, Result};

/// Smallest admissible argument of [`riemann_zeta`].
pub const ZETA_MIN_ARG: f64 = 1.0 + 1e-6;

const EM_CUTOFF: u32 = 32;

/// Even Bernoulli numbers `B_2, B_4, ..., B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// A zeta value with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `ζ(τ)` for real `τ >= 1 + 1e-6`.
pub fn riemann_zeta(tau: f64) -> Result<f64> {
    riemann_zeta_certified(tau).map(|z| z.value)
}

/// Partial sum to `M - 1`, the integral tail `M^{1-τ}/(τ-1)`, and the
/// Euler-Maclaurin corrections at `M`. The remainder after the last
/// Bernoulli term is bounded by the first omitted term.
pub fn riemann_zeta_certified(tau: f64) -> Result<ZetaValue> {
    if !(tau >= ZETA_MIN_ARG) {
        return Err(Error::DomainError(format!(
            "zeta argument {tau} must be >= {ZETA_MIN_ARG}"
        )));
    }
    let m = EM_CUTOFF as f64;
    let mut partial = 0.0;
    // descending so the small terms accumulate first
    for k in (1..EM_CUTOFF).rev() {
        partial += (k as f64).powf(-tau);
    }
    let m_pow = m.powf(-tau);
    let mut value = partial + m * m_pow / (tau - 1.0) + 0.5 * m_pow;
    // term_j = B_{2j}/(2j)! · τ(τ+1)…(τ+2j-2) · M^{-τ-2j+1}
    let mut rising = tau;
    let mut factorial = 2.0;
    let mut m_term = m_pow / m;
    let mut last = 0.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / factorial * rising * m_term;
        if j + 1 == BERNOULLI_EVEN.len() {
            last = term.abs();
            break;
        }
        value += term;
        let two_j = 2.0 * (j as f64 + 1.0);
        rising *= (tau + two_j - 1.0) * (tau + two_j);
        factorial *= (two_j + 1.0) * (two_j + 2.0);
        m_term /= m * m;
    }
    Ok(ZetaValue {
        value,
        error_bound: last + 4.0 * f64::EPSILON * value,
    })
}

/// `Z_{s,p}`; requires `(s, p)` in a regime where the constant exists.
pub fn young_constant(params: &FLParams) -> Result<f64> {
    if !params.regime().has_young_constant() {
        return Err(Error::DomainError(format!(
            "Z_(s,p) undefined for (s, p) = ({}, {})",
            params.s, params.p
        )));
    }
    if params.p == 1.0 {
        return Ok(1.0);
    }
    let q = params.conjugate();
    let zeta = riemann_zeta((params.s + 1.0) * q)?;
    Ok((2.0 * zeta).powf(1.0 / q))
}

/// `z_{s,p} = Z_{s-1, 2p/(p+2)}` in the main regime; `1` for `(s >= 0, p = 2)`.
pub fn embedding_constant(params: &FLParams) -> Result<f64> {
    match params.regime() {
        Regime::L2 => Ok(1.0),
        Regime::Main => {
            let q = if params.p.is_infinite() {
                2.0
            } else {
                2.0 * params.p / (params.p + 2.0)
            };
            young_constant(&FLParams {
                s: params.s - 1.0,
                p: q,
            })
        }
        _ => Err(Error::DomainError(format!(
            "z_(s,p) undefined for (s, p) = ({}, {})",
            params.s, params.p
        ))),
    }
}

use serde::{Deserialize, Serialize};

use super::bounds::boundary_tail;
use super::operators::{boundary_term, Method};
use crate::error::{Error, Result};
use crate::spectral::{l2_norm, young_constant, FLParams, SpectralState};

/// Boundary terms `N^1, …, N^{n_max}` at one time with a certified tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NFSeries {
    pub n_max: usize,
    /// Per-mode bound on `Σ_{n > n_max} |N^n_k|`.
    pub tail_bound: f64,
    pub basis_time: f64,
    /// `terms[n - 1]` is `N^n` on its full support `|k| <= nK`.
    pub terms: Vec<SpectralState>,
}

impl NFSeries {
    pub fn term(&self, n: usize) -> &SpectralState {
        &self.terms[n - 1]
    }

    /// `Σ_{n=from}^{n_max} N^n` restricted to `|k| <= k_out`.
    pub fn partial_sum(&self, from: usize, k_out: usize) -> SpectralState {
        let mut acc = SpectralState::zeros(k_out, self.basis_time, self.terms[0].repr());
        for term in &self.terms[from.max(1) - 1..] {
            acc = acc.add(&term.resized(k_out));
        }
        acc.resized(k_out)
    }

    /// The boundary value `Σ_{n>=2} N^n` on `|k| <= K`.
    pub fn boundary_value(&self) -> SpectralState {
        self.partial_sum(2, self.terms[0].k_max())
    }
}

/// Terms through `n_max` by the fast path; the tail uses `C₀ = ‖v‖_{ℓ²}`.
pub fn normal_form_series(v: &SpectralState, t: f64, n_max: usize) -> Result<NFSeries> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("series depth must be >= 2".into()));
    }
    let terms = (1..=n_max)
        .map(|n| boundary_term(v, t, n, Method::Fast))
        .collect::<Result<Vec<_>>>()?;
    let z = young_constant(&FLParams::l2())?;
    Ok(NFSeries {
        n_max,
        tail_bound: boundary_tail(n_max, z, l2_norm(v)),
        basis_time: t,
        terms,
    })
}

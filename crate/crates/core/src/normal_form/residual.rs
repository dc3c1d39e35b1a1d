use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bounds::remainder_bound;
use super::operators::{boundary_term_to, remainder_term_to, resonant_term, Method};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{l2_norm, young_constant, FLParams};

/// Finite-difference errors above this are reported as a too-coarse stride.
pub const STRIDE_TOL: f64 = 1e-8;
/// Slack added to the finite-difference error in the pass criterion.
pub const RESIDUAL_SLACK: f64 = 1e-10;

/// Check of the `n`-step reduced equation at one frequency:
/// `∂_t [v_k - Σ_{j=2}^n N^j_k] = Σ_{j=2}^n R^j_k + I^{n+1}_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResidual {
    pub n: usize,
    pub k: i64,
    pub sup_residual: f64,
    /// Richardson estimate of the fourth-order difference error plus rounding.
    pub fd_error: f64,
    /// `sup_t |I^{n+1}_k|`.
    pub sup_remainder: f64,
    /// Pointwise bound on `|I^{n+1}_k|` with `C₀ = sup_t ‖v‖_{ℓ²}`.
    pub remainder_bound: f64,
    pub passes: bool,
}

fn central4(f: &[Complex64], i: usize, s: usize, h: f64) -> Complex64 {
    (-f[i + 2 * s] + 8.0 * f[i + s] - 8.0 * f[i - s] + f[i - 2 * s]) / (12.0 * s as f64 * h)
}

pub fn finite_reduction_residual(traj: &Trajectory, n: usize, k: i64) -> Result<ReductionResidual> {
    let v_traj = traj.to_interaction();
    let len = v_traj.len();
    if n < 1 || k == 0 || k.unsigned_abs() as usize > traj.k_max() {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and 1 <= |k| <= K, got n = {n}, k = {k}"
        )));
    }
    if len < 9 {
        return Err(Error::StrideTooCoarse {
            estimate: f64::INFINITY,
            tol: STRIDE_TOL,
        });
    }
    let k_out = k.unsigned_abs() as usize;
    let h = v_traj.sample_dt();
    let mut reduced = Vec::with_capacity(len);
    let mut forcing = Vec::with_capacity(len);
    let mut sup_remainder: f64 = 0.0;
    let mut c0: f64 = 0.0;
    for v in v_traj.states() {
        let t = v.time();
        c0 = c0.max(l2_norm(v));
        let mut g = v.get(k);
        let mut r = Complex64::new(0.0, 0.0);
        for j in 2..=n {
            g -= boundary_term_to(v, t, j, Method::Fast, k_out)?.get(k);
            r += resonant_term(v, t, j)?.get(k);
        }
        let rem = remainder_term_to(v, t, n + 1, Method::Fast, k_out)?.get(k);
        sup_remainder = sup_remainder.max(rem.norm());
        reduced.push(g);
        forcing.push(r + rem);
    }
    let mut sup_residual: f64 = 0.0;
    let mut fd_error: f64 = 0.0;
    for i in 4..len - 4 {
        let fine = central4(&reduced, i, 1, h);
        let coarse = central4(&reduced, i, 2, h);
        let rounding = 4.0 * f64::EPSILON * reduced[i].norm().max(1e-300) / h;
        fd_error = fd_error.max((fine - coarse).norm() / 15.0 + rounding);
        sup_residual = sup_residual.max((fine - forcing[i]).norm());
    }
    if fd_error > STRIDE_TOL {
        return Err(Error::StrideTooCoarse {
            estimate: fd_error,
            tol: STRIDE_TOL,
        });
    }
    let z = young_constant(&FLParams::l2())?;
    Ok(ReductionResidual {
        n,
        k,
        sup_residual,
        fd_error,
        sup_remainder,
        remainder_bound: remainder_bound(k, n + 1, z, c0),
        passes: sup_residual <= fd_error + RESIDUAL_SLACK,
    })
}

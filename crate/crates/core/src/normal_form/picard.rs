//! Fixed-point iteration for the integrated normal form equation
//!
//! `v(t) = φ + Σ_{n=2}^{N} (N^n(t)(v(t)) - N^n(0)(φ)) + ∫_0^t (-i/4) M(u) Σ_{n=1}^{N} N^n(v) dt'`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bounds::ContractionConstants;
use super::operators::{boundary_sum, mean_square_at};
use crate::dynamics::{Scheme, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::cumulative_simpson;
use crate::spectral::{fl_norm, FLParams, Representation, SpectralState};

#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub params: FLParams,
    /// Proceed (with a warning) when the data or horizon exceed the
    /// guaranteed contraction regime.
    pub allow_large_data: bool,
    /// Double the node count until halving it changes the update by less
    /// than `tol / 10`.
    pub refine_quadrature: bool,
    pub max_nodes: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            params: FLParams::l2(),
            allow_large_data: false,
            refine_quadrature: true,
            max_nodes: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// `sup_t ‖v_{j+1}(t) - v_j(t)‖_{FL^{s,p}}` per iteration.
    pub updates: Vec<f64>,
    /// Largest ratio of successive updates above the rounding floor.
    pub contraction: f64,
    pub data_norm: f64,
    pub smallness: f64,
    pub horizon_limit: f64,
    pub quad_nodes: usize,
    /// `sup_t` change of the time integral when every other node is dropped.
    pub quadrature_change: f64,
    pub embedding_extended: bool,
    pub warnings: Vec<String>,
}

pub fn picard_solve(
    phi: &SpectralState,
    t_final: f64,
    n_max: usize,
    quad_nodes: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(Trajectory, PicardReport)> {
    picard_solve_with(
        phi,
        t_final,
        n_max,
        quad_nodes,
        tol,
        max_iter,
        &PicardOptions::default(),
    )
}

pub fn picard_solve_with(
    phi: &SpectralState,
    t_final: f64,
    n_max: usize,
    quad_nodes: usize,
    tol: f64,
    max_iter: usize,
    opts: &PicardOptions,
) -> Result<(Trajectory, PicardReport)> {
    if n_max < 1 || quad_nodes < 3 || !(t_final > 0.0) || !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidArgument(format!(
            "invalid Picard settings: T = {t_final}, N = {n_max}, nodes = {quad_nodes}, tol = {tol}"
        )));
    }
    let constants = ContractionConstants::new(&opts.params)?;
    let data_norm = fl_norm(phi, &opts.params);
    let horizon_limit = constants.horizon(data_norm);
    let mut warnings = Vec::new();
    if data_norm > constants.smallness {
        if !opts.allow_large_data {
            return Err(Error::SmallnessViolated {
                norm: data_norm,
                threshold: constants.smallness,
            });
        }
        warnings.push(format!(
            "data norm {data_norm} exceeds the contraction threshold {}",
            constants.smallness
        ));
    }
    if t_final > horizon_limit {
        if !opts.allow_large_data {
            return Err(Error::HorizonTooLong {
                horizon: t_final,
                limit: horizon_limit,
            });
        }
        warnings.push(format!("horizon {t_final} exceeds the guaranteed time {horizon_limit}"));
    }
    if constants.embedding_extended {
        warnings.push("embedding constant taken as 1 for p = 2".into());
    }

    let mut nodes = quad_nodes;
    loop {
        let run = iterate(phi, t_final, n_max, nodes, tol, max_iter, &opts.params)?;
        if !opts.refine_quadrature || run.quadrature_change < tol / 10.0 {
            let contraction = contraction_factor(&run.updates, &run.states, tol);
            let report = PicardReport {
                iterations: run.updates.len(),
                updates: run.updates,
                contraction,
                data_norm,
                smallness: constants.smallness,
                horizon_limit,
                quad_nodes: nodes,
                quadrature_change: run.quadrature_change,
                embedding_extended: constants.embedding_extended,
                warnings,
            };
            let h = t_final / (nodes - 1) as f64;
            return Ok((Trajectory::new(run.states, h, h, Scheme::NormalForm)?, report));
        }
        let next = 2 * nodes - 1;
        if next > opts.max_nodes {
            return Err(Error::QuadratureNotConverged {
                estimate: run.quadrature_change,
            });
        }
        nodes = next;
    }
}

struct Run {
    states: Vec<SpectralState>,
    updates: Vec<f64>,
    quadrature_change: f64,
}

fn iterate(
    phi: &SpectralState,
    t_final: f64,
    n_max: usize,
    nodes: usize,
    tol: f64,
    max_iter: usize,
    params: &FLParams,
) -> Result<Run> {
    let k_max = phi.k_max();
    let t0 = phi.time();
    let h = t_final / (nodes - 1) as f64;
    let times: Vec<f64> = (0..nodes).map(|i| t0 + i as f64 * h).collect();
    let start = phi.to_interaction();
    let base = boundary_sum(&start, t0, n_max, k_max)?.add(&start);
    let mut states: Vec<SpectralState> = times.iter().map(|&t| start.clone().with_time(t)).collect();
    let mut updates = Vec::new();
    let mut growth = 0;
    loop {
        let (next, integral_half) = gamma(&start, &base, &states, &times, n_max, h)?;
        let update = states
            .iter()
            .zip(&next.0)
            .map(|(a, b)| fl_norm(&a.sub(b), params))
            .fold(0.0, f64::max);
        if !update.is_finite() {
            return Err(Error::NotContracting {
                iterations: updates.len() + 1,
                update,
            });
        }
        if let Some(&prev) = updates.last() {
            growth = if update > prev { growth + 1 } else { 0 };
        }
        updates.push(update);
        states = next.0;
        if update < tol {
            let quadrature_change = next
                .1
                .iter()
                .step_by(2)
                .zip(&integral_half)
                .map(|(a, b)| fl_norm(&a.sub(b), params))
                .fold(0.0, f64::max);
            return Ok(Run {
                states,
                updates,
                quadrature_change,
            });
        }
        if growth >= 3 || updates.len() >= max_iter {
            return Err(Error::NotContracting {
                iterations: updates.len(),
                update,
            });
        }
    }
}

type GammaOut = ((Vec<SpectralState>, Vec<SpectralState>), Vec<SpectralState>);

/// One application of the map; also returns the running time integrals at
/// full and half node density.
fn gamma(
    start: &SpectralState,
    base: &SpectralState,
    states: &[SpectralState],
    times: &[f64],
    n_max: usize,
    h: f64,
) -> Result<GammaOut> {
    let k_max = start.k_max();
    let mut boundary = Vec::with_capacity(states.len());
    let mut integrand: Vec<Vec<Complex64>> = vec![Vec::with_capacity(states.len()); 2 * k_max];
    for (v, &t) in states.iter().zip(times) {
        let sum = boundary_sum(v, t, n_max, k_max)?;
        let m = mean_square_at(v, t);
        let factor = Complex64::new(0.0, -0.25) * m;
        for (slot, c) in sum.coeffs().iter().enumerate() {
            integrand[slot].push(factor * c);
        }
        boundary.push(sum.add(v));
    }
    let full: Vec<Vec<Complex64>> = integrand.iter().map(|f| cumulative_simpson(f, h)).collect();
    let half: Vec<Vec<Complex64>> = integrand
        .iter()
        .map(|f| {
            let coarse: Vec<Complex64> = f.iter().step_by(2).copied().collect();
            cumulative_simpson(&coarse, 2.0 * h)
        })
        .collect();
    let collect = |table: &[Vec<Complex64>], i: usize, t: f64| {
        let coeffs = table.iter().map(|col| col[i]).collect();
        SpectralState::from_coeffs(coeffs, t, Representation::Interaction)
    };
    let mut next = Vec::with_capacity(states.len());
    let mut integrals = Vec::with_capacity(states.len());
    for (i, &t) in times.iter().enumerate() {
        let integral = collect(&full, i, t)?;
        let value = start.add(&boundary[i]).sub(base).add(&integral).with_time(t);
        next.push(value);
        integrals.push(integral);
    }
    let half_integrals = (0..half[0].len())
        .map(|j| collect(&half, j, times[2 * j]))
        .collect::<Result<Vec<_>>>()?;
    Ok(((next, integrals), half_integrals))
}

fn contraction_factor(updates: &[f64], states: &[SpectralState], tol: f64) -> f64 {
    let scale = states.iter().map(|s| s.max_abs()).fold(0.0, f64::max);
    let floor = (1e3 * f64::EPSILON * scale).max(tol);
    updates
        .windows(2)
        .filter(|w| w[1] > floor)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

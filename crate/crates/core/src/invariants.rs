//! The quantities `Q_k(t) = e^{-(i/4)∫₀ᵗ M(u)} Σ_{n>=1} N^n_k(t)(v(t))`,
//! constant along solutions and equal to `2k W⁰_k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cole_hopf::gauge0;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::normal_form::{boundary_sum, boundary_tail};
use crate::quadrature::cumulative_simpson;
use crate::spectral::{dispersion_phase, l2_norm, mean_square, young_constant, FLParams, SpectralState};

/// Largest accepted per-mode tail of the truncated series.
pub const Q_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantTrace {
    pub k: i64,
    pub n_max: usize,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `2k W⁰_k` of the first sample.
    pub reference: Complex64,
    /// `max_t |Q_k(t) - Q_k(t₀)|`.
    pub drift: f64,
    /// `max_t |Q_k(t) - reference|`.
    pub reference_deviation: f64,
    /// Series truncation bound, maximized over samples.
    pub tail_bound: f64,
    /// Change of `e^{-(i/4)∫M}` at the final time when every other sample
    /// is dropped.
    pub quadrature_error: f64,
}

impl InvariantTrace {
    /// `q_k(t) = e^{-ik²t} Q_k(t)`.
    pub fn free_view(&self) -> Vec<Complex64> {
        self.times
            .iter()
            .zip(&self.values)
            .map(|(&t, &q)| dispersion_phase(self.k, -t) * q)
            .collect()
    }

    /// Rows `k,t,re,im,|Q - Q_ref|`.
    pub fn to_csv_rows(&self, out: &mut String) {
        for (t, q) in self.times.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.k,
                t,
                q.re,
                q.im,
                (q - self.reference).norm()
            ));
        }
    }
}

pub const CSV_HEADER: &str = "k,t,re,im,deviation\n";

pub fn traces_to_csv(traces: &[InvariantTrace]) -> String {
    let mut out = String::from(CSV_HEADER);
    for trace in traces {
        trace.to_csv_rows(&mut out);
    }
    out
}

/// Aggregate over a set of traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub ks: Vec<i64>,
    pub max_drift: f64,
    pub max_reference_deviation: f64,
    pub max_tail_bound: f64,
    pub max_quadrature_error: f64,
}

pub fn summarize(traces: &[InvariantTrace]) -> InvariantSummary {
    let fold = |f: fn(&InvariantTrace) -> f64| traces.iter().map(f).fold(0.0, f64::max);
    InvariantSummary {
        ks: traces.iter().map(|t| t.k).collect(),
        max_drift: fold(|t| t.drift),
        max_reference_deviation: fold(|t| t.reference_deviation),
        max_tail_bound: fold(|t| t.tail_bound),
        max_quadrature_error: fold(|t| t.quadrature_error),
    }
}

pub fn compute_q(traj: &Trajectory, k: i64, n_max: usize) -> Result<InvariantTrace> {
    Ok(compute_q_many(traj, &[k], n_max)?.remove(0))
}

/// Traces for `1 <= |k| <= K/2`.
pub fn compute_q_lower_band(traj: &Trajectory, n_max: usize) -> Result<Vec<InvariantTrace>> {
    let half = (traj.k_max() / 2) as i64;
    let ks: Vec<i64> = (1..=half).flat_map(|m| [-m, m]).collect();
    compute_q_many(traj, &ks, n_max)
}

/// One series evaluation per sample shared by all requested `k`.
pub fn compute_q_many(traj: &Trajectory, ks: &[i64], n_max: usize) -> Result<Vec<InvariantTrace>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("series depth must be >= 1".into()));
    }
    if ks.is_empty() {
        return Ok(Vec::new());
    }
    let k_out = ks.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    if ks.contains(&0) || k_out > traj.k_max() {
        return Err(Error::InvalidArgument(format!(
            "frequencies must satisfy 1 <= |k| <= {}",
            traj.k_max()
        )));
    }
    let phys = traj.to_physical();
    let z = young_constant(&FLParams::l2())?;

    let means = phys.states().iter().map(mean_square).collect::<Result<Vec<_>>>()?;
    let integrals = cumulative_simpson(&means, phys.sample_dt());
    let quadrature_error = if means.len() >= 5 {
        let coarse: Vec<Complex64> = means.iter().step_by(2).copied().collect();
        let half = *cumulative_simpson(&coarse, 2.0 * phys.sample_dt())
            .last()
            .expect("non-empty");
        let full = integrals[2 * (coarse.len() - 1)];
        0.25 * (half - full).norm()
    } else {
        f64::INFINITY
    };

    let mut tail_bound: f64 = 0.0;
    let mut values: Vec<Vec<Complex64>> = vec![Vec::with_capacity(phys.len()); ks.len()];
    for (u, &int_m) in phys.states().iter().zip(&integrals) {
        let v = u.to_interaction();
        let t = u.time();
        tail_bound = tail_bound.max(boundary_tail(n_max, z, l2_norm(&v)));
        let sum = boundary_sum(&v, t, n_max, k_out)?;
        let prefactor = (Complex64::new(0.0, -0.25) * int_m).exp();
        for (col, &k) in values.iter_mut().zip(ks) {
            col.push(prefactor * sum.get(k));
        }
    }
    if tail_bound > Q_TOL {
        return Err(Error::TailTooLarge {
            estimate: tail_bound,
            tol: Q_TOL,
        });
    }

    let w0 = gauge0(&phys.states()[0])?;
    let times = phys.times();
    Ok(ks
        .iter()
        .zip(values)
        .map(|(&k, values)| {
            let reference = 2.0 * k as f64 * w0.get(k);
            let drift = values.iter().map(|q| (q - values[0]).norm()).fold(0.0, f64::max);
            let reference_deviation = values.iter().map(|q| (q - reference).norm()).fold(0.0, f64::max);
            InvariantTrace {
                k,
                n_max,
                times: times.clone(),
                values,
                reference,
                drift,
                reference_deviation,
                tail_bound,
                quadrature_error,
            }
        })
        .collect())
}

/// `2k (G₀ φ)_k`.
pub fn q_reference(phi: &SpectralState, k: i64) -> Result<Complex64> {
    Ok(2.0 * k as f64 * gauge0(&phi.to_physical())?.get(k))
}

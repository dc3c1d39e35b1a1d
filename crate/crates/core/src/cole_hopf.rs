//! The modified Cole-Hopf gauge
//! `W = e^{-(i/4)∫M(u)} e^{-(i/2)J(u)}`, its inverse `u = 2i ∂_x W / W`,
//! the exact solver built on free propagation of `W`, and the sufficient
//! conditions for the loop `W(t)` to avoid the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Scheme, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::cumulative_simpson;
use crate::spectral::grid::{analyze, fft_index, fft_inverse, grid_point, next_pow2, synthesize};
use crate::spectral::{
    dispersion_phase, fl_norm, grid_to_state, mean_square, primitive, young_constant, FLParams, GridField, GridOptions,
    Representation, SpectralState, ALIAS_TOL, MEAN_TOL,
};

/// Smallest admissible `min_x |W|` for the inverse gauge.
pub const W_MIN: f64 = 1e-6;
/// Required non-intersection margin for [`ExactSolver::new`].
pub const EXACT_MARGIN: f64 = 1e-3;
/// Largest accepted a priori aliasing tail of a gauge.
pub const GAUGE_TAIL_TOL: f64 = 1e-13;
/// Grid sizes are doubled up to this cap to meet [`GAUGE_TAIL_TOL`].
pub const MAX_GAUGE_GRID: usize = 1 << 18;
/// Refinement trigger for argument increments in [`winding_number`].
pub const WINDING_STEP_LIMIT: f64 = PI / 2.0;

/// Base grid for pointwise gauge operations on states truncated at `K`.
pub fn gauge_grid_size(k_max: usize) -> usize {
    next_pow2(8 * (2 * k_max + 1)).max(1024)
}

fn freq_of_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Gauge coefficients on an `N`-point grid, zero mode included.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeState {
    coeffs: Vec<Complex64>,
    samples: Vec<Complex64>,
    time: f64,
    k_max: usize,
    min_modulus: f64,
    tail_estimate: f64,
}

impl GaugeState {
    /// From normalized FFT-ordered coefficients; `k_max` is the truncation
    /// of the states this gauge maps to and from.
    pub fn from_coeffs(coeffs: Vec<Complex64>, time: f64, k_max: usize, tail_estimate: f64) -> Result<Self> {
        let n = coeffs.len();
        if n < 2 || !n.is_power_of_two() || 2 * k_max + 2 > n {
            return Err(Error::InvalidArgument(format!(
                "gauge grid {n} unsuitable for K = {k_max}"
            )));
        }
        let mut samples = coeffs.clone();
        fft_inverse(&mut samples);
        let min_modulus = samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        Ok(Self {
            coeffs,
            samples,
            time,
            k_max,
            min_modulus,
            tail_estimate,
        })
    }

    pub fn from_field(field: &GridField, k_max: usize) -> Result<Self> {
        Self::from_coeffs(analyze(field.samples()), field.time(), k_max, 0.0)
    }

    pub fn grid_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn min_modulus(&self) -> f64 {
        self.min_modulus
    }

    /// A priori bound on the aliased coefficient mass.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Coefficient `W_k`, zero outside the grid band.
    pub fn get(&self, k: i64) -> Complex64 {
        let n = self.coeffs.len() as i64;
        if k < -n / 2 || k >= n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[fft_index(k, n as usize)]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn to_field(&self) -> GridField {
        GridField::new(self.samples.clone(), self.time).expect("power-of-two grid")
    }

    /// `|W_0| - Σ_{k≠0} |W_k|`.
    pub fn noint_margin(&self) -> f64 {
        let rest: f64 = self.coeffs[1..].iter().map(|c| c.norm()).sum();
        self.coeffs[0].norm() - rest
    }

    /// `Σ_k |W_k|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Free Schrödinger flow by `Δt`.
    pub fn propagate(&self, delta_t: f64) -> Self {
        let n = self.coeffs.len();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| dispersion_phase(freq_of_index(i, n), -delta_t) * c)
            .collect();
        Self::from_coeffs(coeffs, self.time + delta_t, self.k_max, self.tail_estimate).expect("same grid")
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| factor * c).collect();
        Self::from_coeffs(coeffs, self.time, self.k_max, self.tail_estimate * factor.norm()).expect("same grid")
    }

    /// `‖W - other‖_{ℓ²}` over the common band.
    pub fn distance(&self, other: &GaugeState) -> f64 {
        let n = self.grid_size().max(other.grid_size()) as i64;
        (-n / 2..n / 2)
            .map(|k| (self.get(k) - other.get(k)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Serialize, Deserialize)]
struct GaugeRecord {
    #[serde(rename = "N")]
    grid_size: usize,
    #[serde(rename = "K")]
    k_max: usize,
    time: f64,
    min_modulus: f64,
    tail_estimate: f64,
    coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for GaugeState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.grid_size() as i64;
        let mut order = vec![0i64];
        for m in 1..n / 2 {
            order.extend([-m, m]);
        }
        order.push(-n / 2);
        GaugeRecord {
            grid_size: self.grid_size(),
            k_max: self.k_max,
            time: self.time,
            min_modulus: self.min_modulus,
            tail_estimate: self.tail_estimate,
            coeffs: order
                .into_iter()
                .map(|k| {
                    let c = self.get(k);
                    (k, c.re, c.im)
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaugeState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = GaugeRecord::deserialize(deserializer)?;
        let n = rec.grid_size;
        if n < 2 || !n.is_power_of_two() {
            return Err(serde::de::Error::custom("grid size must be a power of two"));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, re, im) in rec.coeffs {
            if k < -(n as i64) / 2 || k >= n as i64 / 2 {
                return Err(serde::de::Error::custom(format!("frequency {k} outside the grid band")));
            }
            coeffs[fft_index(k, n)] = Complex64::new(re, im);
        }
        GaugeState::from_coeffs(coeffs, rec.time, rec.k_max, rec.tail_estimate).map_err(serde::de::Error::custom)
    }
}

/// `Σ_{n>=n0} a^n / n!`.
fn exp_series_tail(a: f64, n0: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for j in 1..=n0 {
        term *= a / j as f64;
    }
    let mut total = 0.0;
    let mut n = n0;
    loop {
        total += term;
        let ratio = a / (n + 1) as f64;
        if ratio < 0.5 {
            return total + term * ratio / (1.0 - ratio);
        }
        term *= ratio;
        n += 1;
    }
}

/// `W⁰ = e^{-(i/2) J(φ)}`. The grid is doubled until the aliased mass of the
/// exponential series is below [`GAUGE_TAIL_TOL`].
pub fn gauge0(phi: &SpectralState) -> Result<GaugeState> {
    let k_max = phi.k_max();
    let j = primitive(&phi.to_physical());
    let a = 0.5 * j.coeffs().iter().map(|c| c.norm()).sum::<f64>();
    let mut n = gauge_grid_size(k_max);
    let tail = loop {
        // J^m occupies |k| <= mK; powers beyond n0 can alias
        let n0 = (n / 2 - 1) / k_max.max(1) + 1;
        let tail = exp_series_tail(a, n0);
        if tail <= GAUGE_TAIL_TOL {
            break tail;
        }
        if 2 * n > MAX_GAUGE_GRID {
            return Err(Error::TailTooLarge {
                estimate: tail,
                tol: GAUGE_TAIL_TOL,
            });
        }
        n *= 2;
    };
    let mut samples = synthesize(&j, n);
    for z in &mut samples {
        *z = (Complex64::new(0.0, -0.5) * *z).exp();
    }
    GaugeState::from_coeffs(analyze(&samples), phi.time(), k_max, tail)
}

/// Gauge of every sample of a physical trajectory. With `naive` the scalar
/// prefactor `e^{-(i/4)∫M}` is left out.
pub fn gauge_full(traj: &Trajectory, naive: bool) -> Result<Vec<GaugeState>> {
    if traj.repr() != Representation::Physical {
        return Err(Error::InvalidArgument(
            "gauge_full expects a physical trajectory".into(),
        ));
    }
    let means: Vec<Complex64> = traj.states().iter().map(mean_square).collect::<Result<Vec<_>>>()?;
    let integrals = cumulative_simpson(&means, traj.sample_dt());
    traj.states()
        .iter()
        .zip(&integrals)
        .map(|(u, &int_m)| {
            let w = gauge0(u)?;
            Ok(if naive {
                w
            } else {
                w.scaled((Complex64::new(0.0, -0.25) * int_m).exp())
            })
        })
        .collect()
}

/// Departure of a gauge sequence from free propagation of its first entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizationDefect {
    /// `sup_t ‖W(t) - e^{i(t-t₀)∂²} W(t₀)‖_{ℓ²}`.
    pub sup_defect: f64,
    /// Cosine between the final defect and `(e^{(i/4)∫M} - 1) e^{i(t-t₀)∂²}W(t₀)`,
    /// the defect expected when the prefactor is missing.
    pub naive_alignment: f64,
}

pub fn linearization_defect(gauges: &[GaugeState], traj: &Trajectory) -> Result<LinearizationDefect> {
    let first = gauges
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty gauge sequence".into()))?;
    let mut sup_defect: f64 = 0.0;
    for w in gauges {
        let free = first.propagate(w.time() - first.time());
        sup_defect = sup_defect.max(w.distance(&free));
    }
    let means: Vec<Complex64> = traj.states().iter().map(mean_square).collect::<Result<Vec<_>>>()?;
    let int_m = *cumulative_simpson(&means, traj.sample_dt()).last().expect("non-empty");
    let last = gauges.last().expect("non-empty");
    let free = first.propagate(last.time() - first.time());
    let factor = (Complex64::new(0.0, 0.25) * int_m).exp() - 1.0;
    let mut dot = 0.0;
    let mut nd = 0.0;
    let mut np = 0.0;
    for (a, b) in last.coeffs().iter().zip(free.coeffs()) {
        let defect = a - b;
        let predicted = factor * b;
        dot += (defect.conj() * predicted).re;
        nd += defect.norm_sqr();
        np += predicted.norm_sqr();
    }
    let naive_alignment = if nd > 0.0 && np > 0.0 {
        dot / (nd * np).sqrt()
    } else {
        0.0
    };
    Ok(LinearizationDefect {
        sup_defect,
        naive_alignment,
    })
}

/// Winding of the loop `x ↦ W(x)` about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub index: i64,
    /// Accumulated argument divided by `2π`.
    pub raw: f64,
    pub residue: f64,
    pub grid_size: usize,
}

/// Index of the sampled loop, refining the grid (by zero-padding the
/// coefficients) until every argument increment is below
/// [`WINDING_STEP_LIMIT`].
pub fn winding_number(w: &GaugeState) -> Result<Winding> {
    if w.min_modulus() < W_MIN {
        return Err(Error::GaugeSingular {
            min_modulus: w.min_modulus(),
            w_min: W_MIN,
        });
    }
    let mut samples = w.samples().to_vec();
    let mut n = samples.len();
    loop {
        let mut total = 0.0;
        let mut max_step: f64 = 0.0;
        for j in 0..n {
            let step = (samples[(j + 1) % n] / samples[j]).arg();
            max_step = max_step.max(step.abs());
            total += step;
        }
        if max_step < WINDING_STEP_LIMIT {
            let raw = total / (2.0 * PI);
            let index = raw.round() as i64;
            return Ok(Winding {
                index,
                raw,
                residue: (raw - index as f64).abs(),
                grid_size: n,
            });
        }
        if 2 * n > MAX_GAUGE_GRID {
            return Err(Error::GridTooCoarse { max_step, grid_size: n });
        }
        let m = 2 * n;
        let mut padded = vec![Complex64::new(0.0, 0.0); m];
        for (i, &c) in w.coeffs().iter().enumerate() {
            padded[fft_index(freq_of_index(i, w.grid_size()), m)] = c;
        }
        fft_inverse(&mut padded);
        if padded.iter().any(|z| z.norm() < W_MIN) {
            return Err(Error::GaugeSingular {
                min_modulus: padded.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min),
                w_min: W_MIN,
            });
        }
        samples = padded;
        n = m;
    }
}

/// Index predicted from the spatial integral `μ = ∫_T u dx`.
pub fn index_from_integral(mu: Complex64) -> Complex64 {
    -mu / (4.0 * PI)
}

#[derive(Debug, Clone, Copy)]
pub struct InverseOptions {
    pub w_min: f64,
    /// Output truncation; defaults to the gauge's source `K`.
    pub k_out: Option<usize>,
    pub allow_truncation: bool,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self {
            w_min: W_MIN,
            k_out: None,
            allow_truncation: false,
        }
    }
}

/// `u = 2i ∂_x W / W` on the gauge grid.
pub fn inverse_gauge(w: &GaugeState, w_min: f64) -> Result<SpectralState> {
    inverse_gauge_with(
        w,
        &InverseOptions {
            w_min,
            ..InverseOptions::default()
        },
    )
}

pub fn inverse_gauge_with(w: &GaugeState, opts: &InverseOptions) -> Result<SpectralState> {
    if !(w.min_modulus() >= opts.w_min) {
        return Err(Error::GaugeSingular {
            min_modulus: w.min_modulus(),
            w_min: opts.w_min,
        });
    }
    let winding = winding_number(w)?;
    if winding.index != 0 {
        return Err(Error::WindingNonzero { index: winding.index });
    }
    let n = w.grid_size();
    let mut dw: Vec<Complex64> = w
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| Complex64::new(0.0, freq_of_index(i, n) as f64) * c)
        .collect();
    fft_inverse(&mut dw);
    let u: Vec<Complex64> = dw
        .iter()
        .zip(w.samples())
        .map(|(d, s)| Complex64::new(0.0, 2.0) * d / s)
        .collect();
    let field = GridField::new(u, w.time())?;
    let grid_opts = GridOptions {
        mean_tol: MEAN_TOL,
        alias_tol: ALIAS_TOL,
        allow_truncation: opts.allow_truncation,
        strip_mean: false,
        repr: Representation::Physical,
    };
    grid_to_state(&field, opts.k_out.unwrap_or(w.k_max()), &grid_opts)
}

/// Global solver `u(t) = G⁻¹[e^{i(t-t₀)∂²} G₀[φ]]`.
#[derive(Debug, Clone)]
pub struct ExactSolver {
    initial_gauge: GaugeState,
    margin: f64,
    allow_truncation: bool,
}

impl ExactSolver {
    /// Requires the initial gauge to clear the origin by [`EXACT_MARGIN`].
    pub fn new(phi: &SpectralState) -> Result<Self> {
        let solver = Self::unchecked(phi)?;
        if solver.margin - solver.initial_gauge.tail_estimate() < EXACT_MARGIN {
            return Err(Error::DomainError(format!(
                "non-intersection margin {:e} of the initial gauge is below {EXACT_MARGIN:e}",
                solver.margin
            )));
        }
        Ok(solver)
    }

    /// No margin requirement; singular times surface from the inverse gauge.
    pub fn unchecked(phi: &SpectralState) -> Result<Self> {
        let initial_gauge = gauge0(&phi.to_physical())?;
        let margin = initial_gauge.noint_margin();
        Ok(Self {
            initial_gauge,
            margin,
            allow_truncation: false,
        })
    }

    /// Project solutions onto `|k| <= K` instead of failing when the
    /// untruncated flow carries content past `K`.
    pub fn truncating(mut self, allow: bool) -> Self {
        self.allow_truncation = allow;
        self
    }

    pub fn initial_gauge(&self) -> &GaugeState {
        &self.initial_gauge
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn gauge_at(&self, t: f64) -> GaugeState {
        self.initial_gauge.propagate(t - self.initial_gauge.time())
    }

    pub fn solve(&self, t: f64) -> Result<SpectralState> {
        let opts = InverseOptions {
            allow_truncation: self.allow_truncation,
            ..InverseOptions::default()
        };
        inverse_gauge_with(&self.gauge_at(t), &opts)
    }

    /// `n_samples` uniform samples on `[t₀, t₀ + T]`.
    pub fn trajectory(&self, t_final: f64, n_samples: usize) -> Result<Trajectory> {
        if n_samples < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        let t0 = self.initial_gauge.time();
        let h = t_final / (n_samples - 1) as f64;
        let states = (0..n_samples)
            .map(|i| self.solve(t0 + i as f64 * h))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(states, h, h, Scheme::ExactGauge)
    }
}

/// Exact solution at time `t` for data clearing [`EXACT_MARGIN`].
pub fn exact_solve(phi: &SpectralState, t: f64) -> Result<SpectralState> {
    ExactSolver::new(phi)?.solve(t)
}

/// The unique root of `2 e^{-2x} cos x = 1` on `[0, π/2]`, by bisection.
pub fn alpha_threshold() -> f64 {
    let f = |x: f64| 2.0 * (-2.0 * x).exp() * x.cos() - 1.0;
    let (mut lo, mut hi) = (0.0, PI / 2.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// `|W⁰_0| - Σ|W⁰_k|` exceeds its uncertainty.
    pub noint: bool,
    /// `M < π` and `e^{Z‖φ‖/2} < 2e^{-M/2}cos(M/2)`.
    pub sgwp2: bool,
    /// `Z‖φ‖ < 2α`.
    pub small_data: bool,
    /// `Σ|W⁰_k| <= e^{Z‖φ‖/2}`.
    pub l1_bound: bool,
}

/// Sufficient conditions for global existence, all for one datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub params: FLParams,
    pub data_norm: f64,
    pub young_constant: f64,
    /// `sup_x |J(φ)(x)|` on the grid.
    pub m_disturbance: f64,
    /// Bernstein upper bound for the continuous supremum.
    pub m_upper: f64,
    pub noint_margin: f64,
    pub noint_uncertainty: f64,
    pub w0_l1: f64,
    pub l1_bound: f64,
    pub sgwp2_lhs: f64,
    pub sgwp2_rhs: f64,
    pub sgwp2_valid: bool,
    pub alpha: f64,
    pub small_data_threshold: f64,
    /// `(1/δ) e^{Z_{0,2}‖φ‖_{ℓ²}/2} ‖φ‖_{ℓ²}` with `δ` the noint margin.
    pub l2_apriori: Option<f64>,
    pub gauge_grid: usize,
    pub verdicts: Verdicts,
}

pub fn check_conditions(phi: &SpectralState, params: &FLParams) -> Result<ConditionReport> {
    let young = young_constant(params)?;
    let phi = phi.to_physical();
    let data_norm = fl_norm(&phi, params);
    let k_max = phi.k_max();

    let n = 4 * gauge_grid_size(k_max);
    let j = synthesize(&primitive(&phi), n);
    let m_disturbance = j.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // |J'| <= K sup|J| gives sup|J| <= grid max / (1 - πK/N)
    let m_upper = m_disturbance / (1.0 - PI * k_max as f64 / n as f64);

    let w0 = gauge0(&phi)?;
    let noint_margin = w0.noint_margin();
    let noint_uncertainty = w0.tail_estimate() + 16.0 * f64::EPSILON * w0.l1_norm();
    let w0_l1 = w0.l1_norm();
    let l1_bound = (0.5 * young * data_norm).exp();

    let sgwp2_valid = m_upper < PI;
    let sgwp2_lhs = l1_bound;
    let sgwp2_rhs = 2.0 * (-0.5 * m_upper).exp() * (0.5 * m_upper).cos();
    let alpha = alpha_threshold();
    let small_data_threshold = 2.0 * alpha / young;

    let noint = noint_margin > noint_uncertainty;
    let l2 = fl_norm(&phi, &FLParams::l2());
    let z02 = young_constant(&FLParams::l2())?;
    let l2_apriori = noint.then(|| (0.5 * z02 * l2).exp() * l2 / noint_margin);

    Ok(ConditionReport {
        params: *params,
        data_norm,
        young_constant: young,
        m_disturbance,
        m_upper,
        noint_margin,
        noint_uncertainty,
        w0_l1,
        l1_bound,
        sgwp2_lhs,
        sgwp2_rhs,
        sgwp2_valid,
        alpha,
        small_data_threshold,
        l2_apriori,
        gauge_grid: w0.grid_size(),
        verdicts: Verdicts {
            noint,
            sgwp2: sgwp2_valid && sgwp2_lhs < sgwp2_rhs,
            small_data: young * data_norm < 2.0 * alpha,
            l1_bound: w0_l1 <= l1_bound * (1.0 + 1e-12) + w0.tail_estimate(),
        },
    })
}

/// Samples of `x ↦ f(x)` as a gauge on an `n`-point grid.
pub fn gauge_from_fn(n: usize, time: f64, k_max: usize, f: impl Fn(f64) -> Complex64) -> Result<GaugeState> {
    let samples: Vec<Complex64> = (0..n).map(|j| f(grid_point(j, n))).collect();
    GaugeState::from_field(&GridField::new(samples, time)?, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cosine(eps: f64, k_max: usize) -> SpectralState {
        SpectralState::from_modes(
            [(1, c(eps, 0.0)), (-1, c(eps, 0.0))],
            k_max,
            0.0,
            Representation::Physical,
        )
        .unwrap()
    }

    #[test]
    fn zero_data_gauge_is_one() {
        let w = gauge0(&SpectralState::zeros(8, 0.0, Representation::Physical)).unwrap();
        assert_eq!(w.zero_mode(), c(1.0, 0.0));
        assert!(w.coeffs()[1..].iter().all(|z| z.norm() == 0.0));
        assert!(inverse_gauge(&w, W_MIN).unwrap().is_zero());
    }

    #[test]
    fn alpha_value() {
        let a = alpha_threshold();
        assert!((2.0 * (-2.0 * a).exp() * a.cos() - 1.0).abs() < 1e-10);
        assert!((a - 0.3205).abs() < 1e-3);
    }

    #[test]
    fn cosine_disturbance_is_exact() {
        let eps = 0.07;
        let report = check_conditions(&cosine(eps, 8), &FLParams::l2()).unwrap();
        assert!((report.m_disturbance - 2.0 * eps).abs() < 1e-15);
        assert!(report.verdicts.noint && report.verdicts.sgwp2 && report.verdicts.small_data);
        assert!(report.verdicts.l1_bound);
    }

    #[test]
    fn winding_examples() {
        let one = gauge_from_fn(64, 0.0, 4, |_| c(1.0, 0.0)).unwrap();
        assert_eq!(winding_number(&one).unwrap().index, 0);
        let loop1 = gauge_from_fn(64, 0.0, 4, |x| Complex64::from_polar(1.0, x)).unwrap();
        let w = winding_number(&loop1).unwrap();
        assert_eq!(w.index, 1);
        assert!(w.residue < 1e-12);
        // u = 2i W'/W = -2, so ∫u = -4π
        assert!((index_from_integral(c(-4.0 * PI, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            inverse_gauge(&loop1, W_MIN).unwrap_err(),
            Error::WindingNonzero { index: 1 }
        ));
        let fast = gauge_from_fn(64, 0.0, 4, |x| Complex64::from_polar(1.0, 20.0 * x)).unwrap();
        let w = winding_number(&fast).unwrap();
        assert_eq!(w.index, 20);
        assert!(w.grid_size > 64);
    }

    #[test]
    fn singular_gauge_rejected() {
        let w = gauge_from_fn(256, 0.0, 8, |x| c(1.0 - x.cos(), 0.0)).unwrap();
        assert!(matches!(
            inverse_gauge(&w, W_MIN).unwrap_err(),
            Error::GaugeSingular { .. }
        ));
    }

    #[test]
    fn gauge_json_roundtrip() {
        let w = gauge0(&cosine(0.1, 4)).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        let back: GaugeState = serde_json::from_str(&text).unwrap();
        assert_eq!(back.coeffs(), w.coeffs());
        assert_eq!(back.grid_size(), 1024);
    }

    #[test]
    fn series_tail_matches_direct_sum() {
        let direct: f64 = (5..60)
            .map(|n| 1.5f64.powi(n) / (1..=n).map(|j| j as f64).product::<f64>())
            .sum();
        let tail = exp_series_tail(1.5, 5);
        assert!(tail >= direct && tail < direct * 1.05);
    }
}

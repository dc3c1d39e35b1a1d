//! Right-hand sides and time integration of the truncated equation,
//! the free propagator and the Galilean boost.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::grid::{analyze, extract_modes, oversampled_grid_size, synthesize};
use crate::spectral::{dispersion_phase, fl_norm, l2_norm, FLParams, Representation, SpectralState};

/// Coefficient magnitude treated as a numerical blowup.
pub const OVERFLOW_GUARD: f64 = 1e8;
/// Default cap on stored trajectory samples.
pub const MAX_STORED_SAMPLES: usize = 4096;
/// Largest admissible number of integrator steps.
pub const STEP_BUDGET: usize = 100_000_000;

/// How a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Rk4,
    ExactGauge,
    ClosedForm,
    NormalForm,
}

/// Uniformly sampled sequence of states in one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<SpectralState>,
    t0: f64,
    sample_dt: f64,
    step: f64,
    scheme: Scheme,
    galilean_shift: f64,
}

impl Trajectory {
    /// `states[i]` must sit at `t0 + i * sample_dt` (to rounding) and share a
    /// representation and truncation.
    pub fn new(states: Vec<SpectralState>, sample_dt: f64, step: f64, scheme: Scheme) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
        let t0 = first.time();
        if states.len() > 1 && !(sample_dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample spacing {sample_dt} must be positive"
            )));
        }
        for (i, s) in states.iter().enumerate() {
            let expect = t0 + i as f64 * sample_dt;
            if (s.time() - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} at t = {} is off the uniform grid",
                    s.time()
                )));
            }
            if s.repr() != first.repr() || s.k_max() != first.k_max() {
                return Err(Error::InvalidArgument(
                    "trajectory samples differ in representation or truncation".into(),
                ));
            }
        }
        Ok(Self {
            states,
            t0,
            sample_dt,
            step,
            scheme,
            galilean_shift: 0.0,
        })
    }

    pub fn states(&self) -> &[SpectralState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.states.last().map_or(self.t0, |s| s.time())
    }

    pub fn sample_dt(&self) -> f64 {
        self.sample_dt
    }

    /// Integrator step (equal to `sample_dt` for non-stepping schemes).
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn repr(&self) -> Representation {
        self.states[0].repr()
    }

    pub fn k_max(&self) -> usize {
        self.states[0].k_max()
    }

    /// Constant `c` added back to the mean-zero samples after a boost.
    pub fn galilean_shift(&self) -> f64 {
        self.galilean_shift
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time()).collect()
    }

    pub fn last(&self) -> &SpectralState {
        self.states.last().expect("non-empty")
    }

    pub fn to_physical(&self) -> Self {
        self.map_states(|s| s.to_physical())
    }

    pub fn to_interaction(&self) -> Self {
        self.map_states(|s| s.to_interaction())
    }

    fn map_states(&self, f: impl Fn(&SpectralState) -> SpectralState) -> Self {
        Self {
            states: self.states.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// Long-format CSV `t,k,re,im`, fixed mode order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,k,re,im\n");
        for s in &self.states {
            for (k, c) in s.modes_fixed_order() {
                let _ = writeln!(out, "{:.17e},{},{:.17e},{:.17e}", s.time(), k, c.re, c.im);
            }
        }
        out
    }

    /// Per-sample `L²` and `FL^{s,p}` norms.
    pub fn summary(&self, params: &FLParams) -> TrajectorySummary {
        let samples = self
            .states
            .iter()
            .map(|s| SampleNorms {
                t: s.time(),
                l2: l2_norm(s),
                fl: fl_norm(s, params),
            })
            .collect();
        TrajectorySummary {
            scheme: self.scheme,
            repr: self.repr(),
            k_max: self.k_max(),
            t0: self.t0,
            t1: self.t1(),
            sample_dt: self.sample_dt,
            step: self.step,
            galilean_shift: self.galilean_shift,
            params: *params,
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleNorms {
    pub t: f64,
    pub l2: f64,
    pub fl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub scheme: Scheme,
    pub repr: Representation,
    pub k_max: usize,
    pub t0: f64,
    pub t1: f64,
    pub sample_dt: f64,
    pub step: f64,
    pub galilean_shift: f64,
    pub params: FLParams,
    pub samples: Vec<SampleNorms>,
}

/// `(ik/2)(u ⊛ u)_k` for `|k| <= K`, the product formed on an oversampled grid.
fn quadratic_term(u: &SpectralState) -> SpectralState {
    let k_max = u.k_max();
    if k_max == 0 {
        return u.clone();
    }
    let n = oversampled_grid_size(k_max);
    let mut samples = synthesize(u, n);
    for z in &mut samples {
        *z = *z * *z;
    }
    let spectrum = analyze(&samples);
    extract_modes(&spectrum, k_max, u.time(), u.repr())
        .expect("finite product")
        .map_modes(|k, c| Complex64::new(0.0, 0.5 * k as f64) * c)
}

/// `(du/dt)_k = -ik² u_k + (ik/2)(u ⊛ u)_k`, truncated to `|k| <= K`.
pub fn rhs_physical(u: &SpectralState) -> Result<SpectralState> {
    if u.repr() != Representation::Physical {
        return Err(Error::InvalidArgument("rhs_physical expects a physical state".into()));
    }
    let q = quadratic_term(u);
    Ok(q.map_modes(|k, c| c - Complex64::new(0.0, (k * k) as f64) * u.get(k)))
}

/// `(dv/dt)_k = (ik/2) Σ_{k₁+k₂=k} e^{i(k²-k₁²-k₂²)t} v_{k₁} v_{k₂}`.
pub fn rhs_interaction(v: &SpectralState, t: f64) -> Result<SpectralState> {
    if v.repr() != Representation::Interaction {
        return Err(Error::InvalidArgument(
            "rhs_interaction expects an interaction state".into(),
        ));
    }
    let mut u = v.map_modes(|k, c| dispersion_phase(k, -t) * c).with_time(t);
    u.set_repr(Representation::Physical);
    let mut out = quadratic_term(&u).map_modes(|k, c| dispersion_phase(k, t) * c);
    out.set_repr(Representation::Interaction);
    Ok(out)
}

/// Integrator settings beyond the step size.
#[derive(Debug, Clone, Copy)]
pub struct Rk4Options {
    pub max_samples: usize,
    pub overflow_guard: f64,
}

impl Default for Rk4Options {
    fn default() -> Self {
        Self {
            max_samples: MAX_STORED_SAMPLES,
            overflow_guard: OVERFLOW_GUARD,
        }
    }
}

/// Smallest stride dividing `n_steps` with at most `max_samples` stored states.
pub fn sample_stride(n_steps: usize, max_samples: usize) -> usize {
    (1..=n_steps.max(1))
        .find(|s| n_steps.is_multiple_of(*s) && n_steps / s < max_samples)
        .unwrap_or(n_steps.max(1))
}

/// Classical RK4 in interaction variables from `v0.time()` to `v0.time() + T`.
pub fn integrate_rk4(v0: &SpectralState, t_final: f64, dt: f64) -> Result<Trajectory> {
    integrate_rk4_with(v0, t_final, dt, &Rk4Options::default())
}

pub fn integrate_rk4_with(v0: &SpectralState, t_final: f64, dt: f64, opts: &Rk4Options) -> Result<Trajectory> {
    if v0.repr() != Representation::Interaction {
        return Err(Error::InvalidArgument(
            "integrate_rk4 expects an interaction state".into(),
        ));
    }
    if !(dt > 0.0) || !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid horizon T = {t_final}, dt = {dt}"
        )));
    }
    let steps_f = (t_final / dt).round();
    if steps_f > STEP_BUDGET as f64 {
        return Err(Error::InvalidArgument(format!(
            "{steps_f} steps exceed the budget {STEP_BUDGET}"
        )));
    }
    let n_steps = steps_f as usize;
    if ((n_steps as f64) * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(Error::InvalidArgument(format!(
            "T = {t_final} is not a multiple of dt = {dt}"
        )));
    }
    let t0 = v0.time();
    if n_steps == 0 {
        return Trajectory::new(vec![v0.clone()], dt, dt, Scheme::Rk4);
    }
    let h = t_final / n_steps as f64;
    let stride = sample_stride(n_steps, opts.max_samples);
    let mut states = Vec::with_capacity(n_steps / stride + 1);
    states.push(v0.clone());
    let mut v = v0.clone();
    let c = |x: f64| Complex64::new(x, 0.0);
    for i in 0..n_steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs_interaction(&v, t)?;
        let k2 = rhs_interaction(&v.axpy(c(0.5 * h), &k1), t + 0.5 * h)?;
        let k3 = rhs_interaction(&v.axpy(c(0.5 * h), &k2), t + 0.5 * h)?;
        let k4 = rhs_interaction(&v.axpy(c(h), &k3), t + h)?;
        let coeffs: Vec<Complex64> = v
            .coeffs()
            .iter()
            .zip(
                k1.coeffs()
                    .iter()
                    .zip(k2.coeffs())
                    .zip(k3.coeffs().iter().zip(k4.coeffs())),
            )
            .map(|(&x, ((a, b), (cc, d)))| x + h / 6.0 * (a + 2.0 * b + 2.0 * cc + d))
            .collect();
        let t_next = t0 + (i + 1) as f64 * h;
        let magnitude = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(magnitude <= opts.overflow_guard) {
            return Err(Error::BlowupSuspected {
                time: t_next,
                magnitude,
            });
        }
        v = SpectralState::from_coeffs(coeffs, t_next, Representation::Interaction)?;
        if (i + 1) % stride == 0 {
            states.push(v.clone());
        }
    }
    Trajectory::new(states, stride as f64 * h, h, Scheme::Rk4)
}

/// Free Schrödinger flow: `c_k ← e^{-ik²Δt} c_k`, time advanced by `Δt`.
pub fn linear_propagate(state: &SpectralState, delta_t: f64) -> SpectralState {
    state
        .map_modes(|k, c| dispersion_phase(k, -delta_t) * c)
        .with_time(state.time() + delta_t)
}

/// Boost `u_c(t, x) = u(t, x + ct) + c`: modes pick up `e^{ikct}`, the
/// constant accumulates in [`Trajectory::galilean_shift`].
pub fn galilean_transform(traj: &Trajectory, c: f64) -> Result<Trajectory> {
    if traj.repr() != Representation::Physical {
        return Err(Error::InvalidArgument(
            "galilean_transform expects a physical trajectory".into(),
        ));
    }
    let states = traj
        .states
        .iter()
        .map(|s| {
            let t = s.time();
            s.map_modes(|k, z| Complex64::from_polar(1.0, k as f64 * c * t) * z)
        })
        .collect();
    Ok(Trajectory {
        states,
        galilean_shift: traj.galilean_shift + c,
        ..traj.clone()
    })
}

/// Finite-difference residual of a sampled physical trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max_t ‖residual(t)‖_{ℓ²}` over interior samples.
    pub max_residual: f64,
    /// Same quantity relative to `max_t ‖∂_t w‖_{ℓ²}`.
    pub relative: f64,
    pub samples_checked: usize,
}

/// Residual of `∂_t u = i∂²u + (u + c)∂u` on the mean-zero part, `c` being
/// the trajectory's Galilean shift.
///
/// Time derivatives use fourth-order central differences of `e^{ik²t}u_k`,
/// so the fast linear phase does not enter the difference quotient.
pub fn dnls_residual(traj: &Trajectory) -> Result<ResidualReport> {
    if traj.repr() != Representation::Physical {
        return Err(Error::InvalidArgument(
            "dnls_residual expects a physical trajectory".into(),
        ));
    }
    let n = traj.len();
    if n < 5 {
        return Err(Error::StrideTooCoarse {
            estimate: f64::INFINITY,
            tol: 0.0,
        });
    }
    let h = traj.sample_dt;
    let shift = traj.galilean_shift;
    let frame: Vec<SpectralState> = traj.states.iter().map(|s| s.to_interaction()).collect();
    let mut max_residual: f64 = 0.0;
    let mut max_rate: f64 = 0.0;
    for i in 2..n - 2 {
        let u = &traj.states[i];
        let t = u.time();
        let q = quadratic_term(u);
        let mut res_sq = 0.0;
        let mut rate_sq = 0.0;
        for (k, _) in u.modes() {
            let fd = (-frame[i + 2].get(k) + 8.0 * frame[i + 1].get(k) - 8.0 * frame[i - 1].get(k)
                + frame[i - 2].get(k))
                / (12.0 * h);
            let rhs = dispersion_phase(k, t) * (q.get(k) + Complex64::new(0.0, k as f64 * shift) * u.get(k));
            res_sq += (fd - rhs).norm_sqr();
            rate_sq += rhs.norm_sqr();
        }
        max_residual = max_residual.max(res_sq.sqrt());
        max_rate = max_rate.max(rate_sq.sqrt());
    }
    Ok(ResidualReport {
        max_residual,
        relative: if max_rate > 0.0 { max_residual / max_rate } else { 0.0 },
        samples_checked: n - 4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha8Rng, k_max: usize, scale: f64, t: f64, repr: Representation) -> SpectralState {
        let modes: Vec<_> = crate::spectral::fixed_order(k_max)
            .map(|k| {
                (
                    k,
                    scale * c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) / (k * k) as f64,
                )
            })
            .collect();
        SpectralState::from_modes(modes, k_max, t, repr).unwrap()
    }

    /// `(ik/2) Σ_{k₁+k₂=k} u_{k₁}u_{k₂} - ik²u_k` by direct double sum.
    fn rhs_physical_direct(u: &SpectralState) -> SpectralState {
        let kk = u.k_max() as i64;
        u.map_modes(|k, uk| {
            let mut acc = c(0.0, 0.0);
            for k1 in -kk..=kk {
                let k2 = k - k1;
                if k1 != 0 && k2 != 0 {
                    acc += u.get(k1) * u.get(k2);
                }
            }
            c(0.0, 0.5 * k as f64) * acc - c(0.0, (k * k) as f64) * uk
        })
    }

    fn max_diff(a: &SpectralState, b: &SpectralState) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn rhs_of_zero_and_single_mode() {
        let zero = SpectralState::zeros(6, 0.0, Representation::Physical);
        assert!(rhs_physical(&zero).unwrap().is_zero());
        assert!(rhs_interaction(&zero.to_interaction(), 0.3).unwrap().is_zero());
        let eps = 0.1;
        let u = SpectralState::from_modes([(1, c(eps, 0.0))], 4, 0.0, Representation::Physical).unwrap();
        let r = rhs_physical(&u).unwrap();
        assert!((r.get(1) - c(0.0, -eps)).norm() < 1e-15);
        assert!((r.get(2) - c(0.0, eps * eps)).norm() < 1e-15);
        assert!(max_diff(&r, &rhs_physical_direct(&u)) < 1e-15);
    }

    #[test]
    fn rhs_matches_double_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k_max in [1, 3, 6, 16] {
            let u = random_state(&mut rng, k_max, 1.0, 0.0, Representation::Physical);
            let fast = rhs_physical(&u).unwrap();
            let direct = rhs_physical_direct(&u);
            assert!(
                max_diff(&fast, &direct) < 1e-13 * direct.max_abs().max(1.0),
                "K = {k_max}"
            );
        }
    }

    #[test]
    fn interaction_rhs_cross_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &t in &[0.0, 0.37, 2.1] {
            let u = random_state(&mut rng, 6, 1.0, t, Representation::Physical);
            let phys = rhs_physical(&u).unwrap();
            let expect = phys.map_modes(|k, d| dispersion_phase(k, t) * (d + c(0.0, (k * k) as f64) * u.get(k)));
            let got = rhs_interaction(&u.to_interaction(), t).unwrap();
            assert!(max_diff(&got, &expect) < 1e-13, "t = {t}");
        }
        assert!(rhs_interaction(&SpectralState::zeros(2, 0.0, Representation::Physical), 0.0).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let v0 = SpectralState::zeros(8, 0.0, Representation::Interaction);
        let traj = integrate_rk4(&v0, 0.5, 0.01).unwrap();
        assert_eq!(traj.len(), 51);
        assert!(traj.states().iter().all(|s| s.is_zero()));
    }

    #[test]
    fn stride_keeps_sample_cap() {
        assert_eq!(sample_stride(10_000, 4096), 4);
        assert_eq!(sample_stride(100, 4096), 1);
        assert_eq!(sample_stride(10_007, 4096), 10_007);
    }

    #[test]
    fn propagate_group_law_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let one = SpectralState::from_modes([(1, c(1.0, 0.0))], 2, 0.0, Representation::Physical).unwrap();
        let p = linear_propagate(&one, std::f64::consts::PI);
        assert!((p.get(1) - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(linear_propagate(&one, 0.0).coeffs(), one.coeffs());
        let params = FLParams::new(0.5, 4.0).unwrap();
        for _ in 0..100 {
            let s = random_state(&mut rng, 10, 1.0, 0.0, Representation::Physical);
            let a = rng.random_range(-5.0..5.0);
            let b = rng.random_range(-5.0..5.0);
            let ab = linear_propagate(&linear_propagate(&s, a), b);
            assert!(max_diff(&ab, &linear_propagate(&s, a + b)) < 1e-13);
            let l2 = l2_norm(&s);
            assert!((l2_norm(&linear_propagate(&s, a)) - l2).abs() <= 1e-14 * l2);
            let fl = fl_norm(&s, &params);
            assert!((fl_norm(&linear_propagate(&s, a), &params) - fl).abs() <= 1e-14 * fl);
        }
    }

    #[test]
    fn overflow_guard_trips() {
        let v0 = SpectralState::from_modes(
            [(1, c(50.0, 0.0)), (-1, c(50.0, 0.0))],
            8,
            0.0,
            Representation::Interaction,
        )
        .unwrap();
        let opts = Rk4Options {
            overflow_guard: 1e3,
            ..Rk4Options::default()
        };
        let err = integrate_rk4_with(&v0, 10.0, 1e-3, &opts).unwrap_err();
        assert!(matches!(err, Error::BlowupSuspected { .. }));
    }

    #[test]
    fn galilean_boost_of_linear_mode() {
        // A free mode, boosted: w_1(t) = e^{-it} e^{ict}.
        let k_max = 2;
        let states: Vec<_> = (0..201)
            .map(|i| {
                let t = i as f64 * 0.005;
                SpectralState::from_modes(
                    [(1, Complex64::from_polar(1e-9, -t))],
                    k_max,
                    t,
                    Representation::Physical,
                )
                .unwrap()
            })
            .collect();
        let traj = Trajectory::new(states, 0.005, 0.005, Scheme::ClosedForm).unwrap();
        let boosted = galilean_transform(&traj, 1.0).unwrap();
        assert_eq!(boosted.galilean_shift(), 1.0);
        for s in boosted.states() {
            assert!((s.get(1) - c(1e-9, 0.0)).norm() < 1e-22);
        }
        let base = dnls_residual(&traj).unwrap();
        let res = dnls_residual(&boosted).unwrap();
        assert!(base.max_residual < 1e-17 && res.max_residual < 1e-17);
        let same = galilean_transform(&traj, 0.0).unwrap();
        assert_eq!(same.states(), traj.states());
    }

    #[test]
    fn trajectory_rejects_irregular_times() {
        let a = SpectralState::zeros(2, 0.0, Representation::Physical);
        let b = SpectralState::zeros(2, 0.3, Representation::Physical);
        assert!(Trajectory::new(vec![a.clone(), b], 0.1, 0.1, Scheme::Rk4).is_err());
        let c2 = SpectralState::zeros(2, 0.1, Representation::Interaction);
        assert!(Trajectory::new(vec![a, c2], 0.1, 0.1, Scheme::Rk4).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = SpectralState::from_modes([(1, c(1.0, 0.0))], 1, 0.0, Representation::Physical).unwrap();
        let traj = Trajectory::new(vec![s], 0.1, 0.1, Scheme::Rk4).unwrap();
        let csv = traj.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,k,re,im");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains(",-1,"));
        let summary = traj.summary(&FLParams::l2());
        assert_eq!(summary.samples[0].l2, 1.0);
    }
}

//! The explicit solution generated by the gauge `W(t,x) = 1 - i e^{-it} cos x`,
//! `u(t,x) = -2 e^{-it} sin x / (1 - i e^{-it} cos x)`, whose loop `W(t)`
//! reaches the origin at `t* = π/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cole_hopf::GaugeState;
use crate::dynamics::rhs_physical;
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::spectral::grid::{analyze, fft_index, grid_point};
use crate::spectral::{fl_norm, FLParams, GridField, Representation, SpectralState, MEAN_TOL};

pub const BLOWUP_TIME: f64 = FRAC_PI_2;
/// Times within this distance of [`BLOWUP_TIME`] are refused.
pub const GUARD_BAND: f64 = 1e-12;
/// Allowed gap between sampled `|u|` and the closed modulus.
pub const MODULUS_TOL: f64 = 1e-12;
/// Grid used to truncate the closed form to `K` modes.
pub const RESIDUAL_GRID: usize = 4096;

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t > -BLOWUP_TIME + GUARD_BAND && t < BLOWUP_TIME - GUARD_BAND) {
        return Err(Error::DomainError(format!(
            "t = {t} outside (-π/2, π/2) minus the guard band"
        )));
    }
    Ok(())
}

/// `1 - i e^{-it} cos x`, with the real part `1 - sin t cos x` summed from
/// nonnegative pieces.
pub fn gauge_value(t: f64, x: f64) -> Complex64 {
    let gap = BLOWUP_TIME - t;
    let re = 2.0 * (0.5 * gap).sin().powi(2) + 2.0 * t.sin() * (0.5 * x).sin().powi(2);
    Complex64::new(re, -gap.sin() * x.cos())
}

pub fn field_value(t: f64, x: f64) -> Complex64 {
    -2.0 * Complex64::from_polar(1.0, -t) * x.sin() / gauge_value(t, x)
}

/// `2|sin x| / sqrt(1 - 2 sin t cos x + cos² x)`.
pub fn field_modulus(t: f64, x: f64) -> f64 {
    // 1 - 2 sin t cos x + cos² x = (cos x - sin t)² + cos² t
    let gap = BLOWUP_TIME - t;
    let diff = -2.0 * (0.5 * (x + gap)).sin() * (0.5 * (x - gap)).sin();
    2.0 * x.sin().abs() / diff.hypot(gap.sin())
}

/// The gauge at any time, including `t*`; its coefficients are exact.
pub fn blowup_gauge(t: f64, n: usize) -> Result<GaugeState> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size {n} must be a power of two >= 4"
        )));
    }
    let side = Complex64::new(0.0, -0.5) * Complex64::from_polar(1.0, -t);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    coeffs[0] = Complex64::new(1.0, 0.0);
    coeffs[fft_index(1, n)] = side;
    coeffs[fft_index(-1, n)] = side;
    GaugeState::from_coeffs(coeffs, t, n / 2 - 1, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupSample {
    pub t: f64,
    pub u: GridField,
    /// Normalized `L¹`, `L²`, `L^∞` norms on the grid.
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// `FL^{s,p}` norms of the grid truncation for the requested params.
    pub fl: Vec<(FLParams, f64)>,
    pub min_w_modulus: f64,
    pub mean: Complex64,
    pub modulus_gap: f64,
}

pub fn blowup_fields(t: f64, n: usize) -> Result<BlowupSample> {
    blowup_fields_with(t, n, &[])
}

pub fn blowup_fields_with(t: f64, n: usize, params: &[FLParams]) -> Result<BlowupSample> {
    check_time(t)?;
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size {n} must be a power of two >= 4"
        )));
    }
    let xs: Vec<f64> = (0..n).map(|j| grid_point(j, n)).collect();
    let samples: Vec<Complex64> = xs.iter().map(|&x| field_value(t, x)).collect();
    let modulus_gap = xs
        .iter()
        .zip(&samples)
        .map(|(&x, u)| (u.norm() - field_modulus(t, x)).abs())
        .fold(0.0, f64::max);
    if modulus_gap > MODULUS_TOL {
        return Err(Error::DomainError(format!(
            "closed-form modulus mismatch {modulus_gap:e}"
        )));
    }
    let min_w_modulus = xs
        .iter()
        .map(|&x| gauge_value(t, x).norm())
        .fold(f64::INFINITY, f64::min);
    let inv_n = 1.0 / n as f64;
    let l1 = samples.iter().map(|u| u.norm()).sum::<f64>() * inv_n;
    let l2 = (samples.iter().map(|u| u.norm_sqr()).sum::<f64>() * inv_n).sqrt();
    let linf = samples.iter().map(|u| u.norm()).fold(0.0, f64::max);
    let u = GridField::new(samples, t)?;
    let mean = u.mean();
    if mean.norm() > MEAN_TOL * linf.max(1.0) {
        return Err(Error::MeanNotZero {
            magnitude: mean.norm(),
            tol: MEAN_TOL,
        });
    }
    let fl = if params.is_empty() {
        Vec::new()
    } else {
        let state = truncate(&u, n / 2 - 1)?;
        params.iter().map(|p| (*p, fl_norm(&state, p))).collect()
    };
    Ok(BlowupSample {
        t,
        u,
        l1,
        l2,
        linf,
        fl,
        min_w_modulus,
        mean,
        modulus_gap,
    })
}

fn truncate(field: &GridField, k_max: usize) -> Result<SpectralState> {
    let spectrum = analyze(field.samples());
    let n = spectrum.len();
    let modes = (1..=k_max as i64)
        .flat_map(|m| [-m, m])
        .map(|k| (k, spectrum[fft_index(k, n)]));
    SpectralState::from_modes(modes, k_max, field.time(), Representation::Physical)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormPoint {
    pub eps: f64,
    pub t: f64,
    /// `f64::INFINITY` for the sup norm.
    pub p: f64,
    pub value: f64,
    pub error: f64,
}

/// Normalized `‖u(π/2 - ε)‖_{L^p}` for each `ε ∈ (0, 1/2]`.
pub fn blowup_norm_curve(p: f64, eps_list: &[f64]) -> Result<Vec<NormPoint>> {
    if !(p >= 1.0) {
        return Err(Error::DomainError(format!("p = {p} must be >= 1")));
    }
    eps_list
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps <= 0.5) {
                return Err(Error::DomainError(format!("ε = {eps} outside (0, 0.5]")));
            }
            let t = BLOWUP_TIME - eps;
            check_time(t)?;
            let (value, error) = if p.is_infinite() { sup_norm(t) } else { lp_norm(t, p)? };
            Ok(NormPoint {
                eps,
                t,
                p,
                value,
                error,
            })
        })
        .collect()
}

/// Breakpoints on `[0, π]` graded geometrically towards the peak near 0.
fn graded_breakpoints(scale: f64) -> Vec<f64> {
    let mut points = vec![0.0];
    let mut x = scale * 1e-3;
    while x < 1.0 {
        points.push(x);
        x *= 2.0;
    }
    points.extend([1.0, 2.0, PI]);
    points
}

fn lp_norm(t: f64, p: f64) -> Result<(f64, f64)> {
    let eps = BLOWUP_TIME - t;
    // |W(t,0)| = sqrt(2(1 - sin t)) sets the width of the peak
    let width = (2.0 * (1.0 - t.sin())).sqrt().max(eps * eps);
    let breakpoints = graded_breakpoints(width);
    let f = |x: f64| field_modulus(t, x).powf(p);
    let rough = integrate_adaptive(f, &breakpoints, f64::INFINITY, usize::MAX)?.value;
    let quad = integrate_adaptive(f, &breakpoints, 1e-13 * rough.max(1e-300), 20_000)?;
    // the integrand is even in x
    let integral = quad.value / PI;
    let value = integral.powf(1.0 / p);
    let error = value / (p * integral) * quad.error / PI;
    Ok((value, error))
}

fn sup_norm(t: f64) -> (f64, f64) {
    let f = |x: f64| field_modulus(t, x);
    let mut best = (0.0, f(0.0));
    for x in graded_breakpoints(BLOWUP_TIME - t)
        .windows(2)
        .flat_map(|w| (0..64).map(move |j| w[0] + (w[1] - w[0]) * j as f64 / 64.0))
    {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    // golden-section refinement around the best sample
    let (mut a, mut b) = ((best.0 * 0.5).max(0.0), (best.0 * 1.5).max(best.0 + 1e-9).min(PI));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let refined = f(0.5 * (a + b)).max(best.1);
    (refined, (refined - best.1).abs().max(f64::EPSILON * refined))
}

/// Least-squares slope of `value` against `ln(1/ε)`.
pub fn log_fit_slope(points: &[NormPoint]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (1.0 / p.eps).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.value).sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.value - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupResidual {
    pub t: f64,
    pub dt: f64,
    pub k_max: usize,
    /// `ℓ²` norm of the difference between the time derivative and the
    /// right-hand side on `|k| <= K`.
    pub residual: f64,
    pub relative: f64,
    /// Relative `ℓ²` mass of the closed form beyond `K`.
    pub tail_indicator: f64,
}

/// Fourth-order central difference of five states spaced by `dt`, minus the
/// right-hand side at the middle state.
pub fn fd_residual(window: &[SpectralState; 5], dt: f64) -> Result<SpectralState> {
    let [a, b, c, d, e] = window;
    let derivative = a
        .sub(&b.scaled(8.0.into()))
        .add(&d.scaled(8.0.into()))
        .sub(e)
        .scaled((1.0 / (12.0 * dt)).into());
    Ok(derivative.sub(&rhs_physical(c)?))
}

pub fn blowup_residual(t: f64, dt: f64, k_max: usize) -> Result<BlowupResidual> {
    if !(dt > 0.0) || k_max == 0 || 2 * k_max + 2 > RESIDUAL_GRID {
        return Err(Error::InvalidArgument(format!("dt = {dt}, K = {k_max}")));
    }
    check_time(t - 2.0 * dt)?;
    check_time(t + 2.0 * dt)?;
    let n = RESIDUAL_GRID;
    let mut tail_indicator: f64 = 0.0;
    let mut states = Vec::with_capacity(5);
    for j in -2i32..=2 {
        let tj = t + j as f64 * dt;
        let field = GridField::from_fn(n, tj, |x| field_value(tj, x))?;
        let spectrum = analyze(field.samples());
        let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
        let beyond: f64 = (k_max + 1..=n - k_max - 1).map(|i| spectrum[i].norm_sqr()).sum();
        tail_indicator = tail_indicator.max((beyond / total).sqrt());
        states.push(truncate(&field, k_max)?);
    }
    let window: [SpectralState; 5] = states.try_into().expect("five states");
    let res = fd_residual(&window, dt)?;
    let residual = res.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let scale = rhs_physical(&window[2])?
        .coeffs()
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(BlowupResidual {
        t,
        dt,
        k_max,
        residual,
        relative: residual / scale.max(f64::MIN_POSITIVE),
        tail_indicator,
    })
}

/// The closed form at `t` truncated to `K` modes.
pub fn blowup_state(t: f64, k_max: usize) -> Result<SpectralState> {
    check_time(t)?;
    let field = GridField::from_fn(RESIDUAL_GRID, t, |x| field_value(t, x))?;
    truncate(&field, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_profile() {
        let s = blowup_fields(0.0, 1024).unwrap();
        assert!((s.l2 - 2.0 * (2f64.sqrt() - 1.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.u.samples()[0], Complex64::new(0.0, 0.0));
        assert!(s.mean.norm() < 1e-15);
    }

    #[test]
    fn guard_band() {
        assert!(matches!(blowup_fields(BLOWUP_TIME, 64), Err(Error::DomainError(_))));
        assert!(matches!(
            blowup_fields(BLOWUP_TIME - 1e-13, 64),
            Err(Error::DomainError(_))
        ));
        assert!(blowup_gauge(BLOWUP_TIME, 64).is_ok());
    }

    #[test]
    fn gauge_minimum_near_blowup() {
        let t = BLOWUP_TIME - 1e-3;
        let s = blowup_fields(t, 256).unwrap();
        // |W(t,0)|² = 2(1 - sin t) = 4 sin²(ε/2)
        let expect = 2.0 * (0.5e-3f64).sin();
        assert!((s.min_w_modulus - expect).abs() < 1e-12 * expect);
        let w = blowup_gauge(t, 256).unwrap();
        assert!((w.min_modulus() - s.min_w_modulus).abs() < 1e-14);
    }

    #[test]
    fn zero_field_residual() {
        let zero = SpectralState::zeros(8, 0.0, Representation::Physical);
        let window = [zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero];
        assert!(fd_residual(&window, 1e-3).unwrap().is_zero());
    }

    #[test]
    fn sup_norm_grows() {
        let curve = blowup_norm_curve(f64::INFINITY, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].value > w[0].value));
        // peak ≈ 2/sqrt(ε) at x ≈ sqrt(2ε)
        for point in &curve {
            let ratio = point.value * point.eps.sqrt() / 2.0;
            assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
        }
    }
}

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::state::{Representation, SpectralState};
use crate::error::{Error, Result};

/// Zero-mode tolerance when extracting mean-zero coefficients.
pub const MEAN_TOL: f64 = 1e-10;
/// Relative spectral tail above which truncation is refused.
pub const ALIAS_TOL: f64 = 1e-9;
/// Products and exponentials go on grids at least this many times `2K+1`.
pub const OVERSAMPLING_FACTOR: usize = 4;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// In-place `X_k = Σ_j x_j e^{-2πi jk/N}` (unnormalized).
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place `x_j = Σ_k X_k e^{+2πi jk/N}` (unnormalized).
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// FFT buffer index of frequency `k` on an `n`-point grid.
#[inline]
pub(crate) fn fft_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Grid size used for products of states truncated at `K`.
pub fn oversampled_grid_size(k_max: usize) -> usize {
    next_pow2(OVERSAMPLING_FACTOR * (2 * k_max + 1))
}

/// Places the state's coefficients into an FFT-ordered buffer of length `n`.
pub(crate) fn scatter(state: &SpectralState, n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in state.modes() {
        buf[fft_index(k, n)] += c;
    }
    buf
}

/// Evaluates `Σ_k c_k e^{ik x_j}` on the `n`-point grid.
pub(crate) fn synthesize(state: &SpectralState, n: usize) -> Vec<Complex64> {
    let mut buf = scatter(state, n);
    fft_inverse(&mut buf);
    buf
}

/// Normalized coefficients `(1/N) Σ_j f_j e^{-ik x_j}` in FFT order.
pub(crate) fn analyze(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    let scale = 1.0 / samples.len() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Complex samples at `x_j = 2πj/N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridField {
    samples: Vec<Complex64>,
    time: f64,
}

impl GridField {
    pub fn new(samples: Vec<Complex64>, time: f64) -> Result<Self> {
        let n = samples.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size {n} is not a power of two >= 2"
            )));
        }
        Ok(Self { samples, time })
    }

    pub fn from_fn(n: usize, time: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = (0..n).map(|j| f(grid_point(j, n))).collect();
        Self::new(samples, time)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn x(&self, j: usize) -> f64 {
        grid_point(j, self.samples.len())
    }

    pub fn min_modulus(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
    }

    /// `(1/N) Σ_j f_j`, the zero Fourier mode.
    /// Rows `j,x,re,im` under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,x,re,im\n");
        for (j, z) in self.samples.iter().enumerate() {
            out.push_str(&format!("{j},{:.17e},{:.17e},{:.17e}\n", self.x(j), z.re, z.im));
        }
        out
    }

    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.samples.len() as f64
    }
}

pub fn grid_point(j: usize, n: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}

/// Options for [`grid_to_state`].
#[derive(Debug, Clone, Copy)]
pub struct GridOptions {
    pub mean_tol: f64,
    pub alias_tol: f64,
    pub allow_truncation: bool,
    /// Drop the zero mode regardless of magnitude.
    pub strip_mean: bool,
    pub repr: Representation,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            mean_tol: MEAN_TOL,
            alias_tol: ALIAS_TOL,
            allow_truncation: false,
            strip_mean: false,
            repr: Representation::Physical,
        }
    }
}

impl GridOptions {
    pub fn truncating() -> Self {
        Self {
            allow_truncation: true,
            ..Self::default()
        }
    }
}

/// Samples `Σ_k c_k e^{ik x_j}` on an `n`-point grid; `n` must be a power
/// of two with `n >= 2K + 2`.
pub fn grid_transform(state: &SpectralState, n: usize) -> Result<GridField> {
    if !n.is_power_of_two() || n < 2 * state.k_max() + 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size {n} must be a power of two >= 2K+2 = {}",
            2 * state.k_max() + 2
        )));
    }
    GridField::new(synthesize(state, n), state.time())
}

/// Extracts the mean-zero coefficients `|k| <= K` of a grid field.
pub fn grid_to_state(field: &GridField, k_max: usize, opts: &GridOptions) -> Result<SpectralState> {
    let n = field.len();
    if 2 * k_max + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "K = {k_max} not resolvable on a grid of {n} points"
        )));
    }
    let spectrum = analyze(field.samples());
    let scale = rms(field.samples()).max(1.0);
    let zero = spectrum[0].norm();
    if !opts.strip_mean && zero > opts.mean_tol * scale {
        return Err(Error::MeanNotZero {
            magnitude: zero,
            tol: opts.mean_tol * scale,
        });
    }
    let mut kept = 0.0;
    let mut state = SpectralState::zeros(k_max, field.time(), opts.repr);
    for k in (-(k_max as i64)..=k_max as i64).filter(|&k| k != 0) {
        let c = spectrum[fft_index(k, n)];
        kept += c.norm_sqr();
        state.set(k, c)?;
    }
    let tail: f64 = (k_max + 1..=n - k_max - 1).map(|i| spectrum[i].norm_sqr()).sum();
    let total = kept + tail;
    if !opts.allow_truncation && total > 0.0 {
        let relative_tail = (tail / total).sqrt();
        if relative_tail > opts.alias_tol {
            return Err(Error::AliasingDetected {
                relative_tail,
                tol: opts.alias_tol,
            });
        }
    }
    Ok(state)
}

/// Mean-zero modes `1 <= |k| <= k_out` of FFT-ordered normalized coefficients.
pub(crate) fn extract_modes(
    spectrum: &[Complex64],
    k_out: usize,
    time: f64,
    repr: Representation,
) -> Result<SpectralState> {
    let n = spectrum.len();
    debug_assert!(2 * k_out < n);
    let coeffs = (-(k_out as i64)..=k_out as i64)
        .filter(|&k| k != 0)
        .map(|k| spectrum[fft_index(k, n)])
        .collect();
    SpectralState::from_coeffs(coeffs, time, repr)
}

/// Smallest power of two that holds frequencies `|k| <= support` without aliasing.
pub(crate) fn alias_free_size(support: usize) -> usize {
    next_pow2(2 * support + 1)
}

fn rms(samples: &[Complex64]) -> f64 {
    (samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / samples.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Bessel J_k(x) by trapezoidal quadrature of (1/π)∫_0^π cos(kτ − x sin τ) dτ.
    fn bessel_j_quadrature(k: i64, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let f = |tau: f64| (k as f64 * tau - x * tau.sin()).cos();
        let mut acc = 0.5 * (f(0.0) + f(PI));
        for j in 1..m {
            acc += f(j as f64 * h);
        }
        acc * h / PI
    }

    #[test]
    fn single_exponential_samples() {
        let s = SpectralState::from_modes([(1, Complex64::new(1.0, 0.0))], 4, 0.0, Representation::Physical).unwrap();
        let g = grid_transform(&s, 16).unwrap();
        for (j, z) in g.samples().iter().enumerate() {
            let x = g.x(j);
            assert!((z - Complex64::new(x.cos(), x.sin())).norm() < 1e-14);
        }
    }

    #[test]
    fn random_roundtrip_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let modes: Vec<_> = (1..=8i64)
            .flat_map(|m| [-m, m])
            .map(|k| {
                (
                    k,
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        let s = SpectralState::from_modes(modes, 8, 0.0, Representation::Physical).unwrap();
        let back = grid_to_state(&grid_transform(&s, 64).unwrap(), 8, &GridOptions::default()).unwrap();
        let err: f64 = s.sub(&back).coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let norm: f64 = s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * norm);
    }

    #[test]
    fn jacobi_anger_coefficients() {
        let field = GridField::from_fn(256, 0.0, |x| Complex64::from_polar(1.0, -x.sin())).unwrap();
        let err = grid_to_state(&field, 16, &GridOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MeanNotZero { .. }));
        let opts = GridOptions {
            strip_mean: true,
            ..GridOptions::default()
        };
        let s = grid_to_state(&field, 16, &opts).unwrap();
        // e^{-i sin x} = Σ J_k(1) e^{-ikx} = Σ (-1)^k J_k(1) e^{ikx}
        for k in -16i64..=16 {
            if k == 0 {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expect = sign * bessel_j_quadrature(k, 1.0);
            assert!((s.get(k) - Complex64::new(expect, 0.0)).norm() < 1e-12, "k = {k}");
        }
        assert!((field.mean().re - bessel_j_quadrature(0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn aliasing_detected_without_truncation_flag() {
        let field = GridField::from_fn(64, 0.0, |x| Complex64::from_polar(1.0, 10.0 * x)).unwrap();
        let err = grid_to_state(&field, 4, &GridOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AliasingDetected { .. }));
        let s = grid_to_state(&field, 4, &GridOptions::truncating()).unwrap();
        assert!(s.is_zero() || s.max_abs() < 1e-14);
    }

    #[test]
    fn rejects_small_or_odd_grids() {
        let s = SpectralState::zeros(8, 0.0, Representation::Physical);
        assert!(grid_transform(&s, 16).is_err());
        assert!(grid_transform(&s, 24).is_err());
        assert!(grid_transform(&s, 32).is_ok());
        assert_eq!(oversampled_grid_size(8), 128);
        assert_eq!(oversampled_grid_size(32), 512);
    }
}

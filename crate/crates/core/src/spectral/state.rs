use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which frame the coefficients are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// The solution `u` itself.
    Physical,
    /// `v_k = e^{ik²t} u_k`, the linear flow factored out.
    Interaction,
}

/// Mean-zero Fourier coefficients on `1 <= |k| <= K`.
///
/// The zero mode has no storage slot, so every state is mean-zero by
/// construction. Coefficients are stored as `[-K, ..., -1, 1, ..., K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    k_max: usize,
    coeffs: Vec<Complex64>,
    time: f64,
    repr: Representation,
}

#[inline]
pub(crate) fn slot(k: i64, k_max: usize) -> usize {
    let kk = k_max as i64;
    if k < 0 {
        (k + kk) as usize
    } else {
        (k + kk - 1) as usize
    }
}

#[inline]
pub(crate) fn freq_of_slot(idx: usize, k_max: usize) -> i64 {
    let kk = k_max as i64;
    let i = idx as i64;
    if i < kk {
        i - kk
    } else {
        i - kk + 1
    }
}

/// `e^{i k² t}`.
#[inline]
pub fn dispersion_phase(k: i64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, ((k * k) as f64) * t)
}

/// Frequencies in the fixed summation order: ascending `|k|`, negative first.
pub fn fixed_order(k_max: usize) -> impl Iterator<Item = i64> {
    (1..=k_max as i64).flat_map(|m| [-m, m])
}

impl SpectralState {
    pub fn zeros(k_max: usize, time: f64, repr: Representation) -> Self {
        Self {
            k_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max],
            time,
            repr,
        }
    }

    /// Builds a state from `(k, c_k)` pairs; unspecified modes are zero.
    pub fn from_modes<I>(modes: I, k_max: usize, time: f64, repr: Representation) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut state = Self::zeros(k_max, time, repr);
        for (k, c) in modes {
            state.set(k, c)?;
        }
        Ok(state)
    }

    /// Builds a state from a slice laid out as `[-K..-1, 1..K]`.
    pub fn from_coeffs(coeffs: Vec<Complex64>, time: f64, repr: Representation) -> Result<Self> {
        if !coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector length {} is odd",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self {
            k_max: coeffs.len() / 2,
            coeffs,
            time,
            repr,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn repr(&self) -> Representation {
        self.repr
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub(crate) fn set_repr(&mut self, repr: Representation) {
        self.repr = repr;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `k`; zero for `k = 0` or `|k| > K`.
    pub fn get(&self, k: i64) -> Complex64 {
        if k == 0 || k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[slot(k, self.k_max)]
        }
    }

    pub fn set(&mut self, k: i64, value: Complex64) -> Result<()> {
        if k == 0 || k.unsigned_abs() as usize > self.k_max {
            return Err(Error::IndexOutOfRange { k, k_max: self.k_max });
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient at k = {k}")));
        }
        let i = slot(k, self.k_max);
        self.coeffs[i] = value;
        Ok(())
    }

    /// `(k, c_k)` in storage order (ascending `k`).
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (freq_of_slot(i, self.k_max), c))
    }

    /// `(k, c_k)` in the fixed summation order.
    pub fn modes_fixed_order(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        fixed_order(self.k_max).map(move |k| (k, self.get(k)))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Applies `f(k, c_k)` to every mode.
    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(freq_of_slot(i, self.k_max), c))
            .collect();
        Self {
            k_max: self.k_max,
            coeffs,
            time: self.time,
            repr: self.repr,
        }
    }

    /// Keeps `|k| <= k_new` (zero-extends when `k_new > K`).
    pub fn resized(&self, k_new: usize) -> Self {
        let mut out = Self::zeros(k_new, self.time, self.repr);
        let common = k_new.min(self.k_max) as i64;
        for k in (-common..=common).filter(|&k| k != 0) {
            out.coeffs[slot(k, k_new)] = self.get(k);
        }
        out
    }

    /// Converts `u` to `v_k = e^{ik²t} u_k`. Identity on interaction states.
    pub fn to_interaction(&self) -> Self {
        match self.repr {
            Representation::Interaction => self.clone(),
            Representation::Physical => {
                let t = self.time;
                let mut out = self.map_modes(|k, c| dispersion_phase(k, t) * c);
                out.repr = Representation::Interaction;
                out
            }
        }
    }

    /// Converts `v` back to `u_k = e^{-ik²t} v_k`. Identity on physical states.
    pub fn to_physical(&self) -> Self {
        match self.repr {
            Representation::Physical => self.clone(),
            Representation::Interaction => {
                let t = self.time;
                let mut out = self.map_modes(|k, c| dispersion_phase(k, -t) * c);
                out.repr = Representation::Physical;
                out
            }
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.map_modes(|_, c| factor * c)
    }

    /// Mode-wise `self + factor * other`; the result has `K = max(K_self, K_other)`.
    pub fn axpy(&self, factor: Complex64, other: &SpectralState) -> Self {
        let k_new = self.k_max.max(other.k_max);
        let mut out = self.resized(k_new);
        for (k, c) in other.modes() {
            let i = slot(k, k_new);
            out.coeffs[i] += factor * c;
        }
        out
    }

    pub fn sub(&self, other: &SpectralState) -> Self {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn add(&self, other: &SpectralState) -> Self {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    #[serde(rename = "K")]
    k_max: usize,
    time: f64,
    repr: Representation,
    coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for SpectralState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateRecord {
            k_max: self.k_max,
            time: self.time,
            repr: self.repr,
            coeffs: self.modes_fixed_order().map(|(k, c)| (k, c.re, c.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectralState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = StateRecord::deserialize(deserializer)?;
        let modes = rec.coeffs.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im)));
        SpectralState::from_modes(modes, rec.k_max, rec.time, rec.repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_input_is_zero_state() {
        let s = SpectralState::from_modes([], 4, 0.0, Representation::Physical).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.coeffs().len(), 8);
    }

    #[test]
    fn zero_mode_rejected() {
        let err = SpectralState::from_modes([(0, c(1.0, 0.0))], 4, 0.0, Representation::Physical).unwrap_err();
        assert_eq!(err, Error::IndexOutOfRange { k: 0, k_max: 4 });
        let err = SpectralState::from_modes([(5, c(1.0, 0.0))], 4, 0.0, Representation::Physical).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { k: 5, .. }));
    }

    #[test]
    fn slot_layout_roundtrip() {
        for k_max in 1..6 {
            for i in 0..2 * k_max {
                assert_eq!(slot(freq_of_slot(i, k_max), k_max), i);
            }
        }
        let order: Vec<i64> = fixed_order(3).collect();
        assert_eq!(order, vec![-1, 1, -2, 2, -3, 3]);
    }

    #[test]
    fn representation_involution() {
        let s = SpectralState::from_modes(
            [(1, c(0.3, -0.1)), (-3, c(0.2, 0.5)), (4, c(-1.0, 0.0))],
            4,
            0.73,
            Representation::Physical,
        )
        .unwrap();
        let back = s.to_interaction().to_physical();
        for (a, b) in s.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() <= 2.0 * f64::EPSILON * a.norm().max(1e-300));
        }
        assert_eq!(s.to_interaction().repr(), Representation::Interaction);
    }

    #[test]
    fn resize_keeps_low_modes() {
        let s =
            SpectralState::from_modes([(1, c(1.0, 0.0)), (3, c(2.0, 0.0))], 3, 0.0, Representation::Physical).unwrap();
        let small = s.resized(2);
        assert_eq!(small.get(1), c(1.0, 0.0));
        assert_eq!(small.get(3), c(0.0, 0.0));
        let big = small.resized(5);
        assert_eq!(big.k_max(), 5);
        assert_eq!(big.get(1), c(1.0, 0.0));
    }

    #[test]
    fn json_roundtrip() {
        let s = SpectralState::from_modes(
            [(1, c(0.5, -0.25)), (-2, c(0.0, 1.0))],
            2,
            0.5,
            Representation::Interaction,
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"K\":2,\"time\":0.5,\"repr\":\"interaction\",\"coeffs\":[[-1,"));
        let back: SpectralState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(
            serde_json::from_str::<SpectralState>(r#"{"K":2,"time":0,"repr":"physical","coeffs":[[0,1,0]]}"#).is_err()
        );
    }
}

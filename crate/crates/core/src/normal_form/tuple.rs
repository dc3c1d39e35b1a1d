use crate::error::{Error, Result};

/// A tuple of nonzero frequencies `(k₁, …, k_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModTuple {
    ks: Vec<i64>,
}

impl ModTuple {
    pub fn new(ks: Vec<i64>) -> Result<Self> {
        if ks.contains(&0) {
            return Err(Error::ZeroFrequency);
        }
        Ok(Self { ks })
    }

    pub fn ks(&self) -> &[i64] {
        &self.ks
    }

    pub fn arity(&self) -> usize {
        self.ks.len()
    }

    /// `k₁ + … + k_n`.
    pub fn total(&self) -> i64 {
        self.ks.iter().sum()
    }

    /// `(Σ k_i)² - Σ k_i²`; zero for a single frequency.
    pub fn phase(&self) -> i64 {
        let sum = self.total();
        let squares: i64 = self.ks.iter().map(|k| k * k).sum();
        let value = sum * sum - squares;
        debug_assert_eq!(value, pairwise_form(&self.ks));
        value
    }
}

fn pairwise_form(ks: &[i64]) -> i64 {
    let mut acc = 0;
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            acc += 2 * ks[i] * ks[j];
        }
    }
    acc
}

/// Modulation `Φ_n(k) = (Σ k_i)² - Σ k_i²` of a frequency tuple.
pub fn modulation(ks: &[i64]) -> Result<i64> {
    ModTuple::new(ks.to_vec()).map(|t| t.phase())
}

/// Calls `f` on every tuple of `n` frequencies in `1 <= |k_i| <= K` with
/// sum `k`. The last entry is solved for, so the cost is `(2K)^{n-1}`.
pub(crate) fn for_each_tuple(n: usize, k_max: usize, k: i64, mut f: impl FnMut(&[i64])) {
    if n == 0 {
        return;
    }
    let kk = k_max as i64;
    let mut ks = vec![0i64; n];
    let freqs: Vec<i64> = crate::spectral::fixed_order(k_max).collect();
    let head = n - 1;
    let mut idx = vec![0usize; head];
    loop {
        let mut partial = 0;
        for (slot, &i) in idx.iter().enumerate() {
            ks[slot] = freqs[i];
            partial += freqs[i];
        }
        let last = k - partial;
        if last != 0 && last.abs() <= kk {
            ks[head] = last;
            f(&ks);
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == head {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < freqs.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

//! Target sequences: regularized decay rates for the cusp construction and
//! the growth sequence `M_p` for the rectilinear one.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest admissible first term, `2^-8`.
pub const EPS_CAP: f64 = 1.0 / 256.0;

/// A finite, slowly decaying sequence `ε_1 ≥ ε_2 ≥ … > 0` with `ε_1 ≤ 2^-8`
/// and `ε_{i+1} ≥ ε_i / 2`.
///
/// Indexing in the public API is 1-based, matching the disk family it feeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DecaySequence {
    values: Vec<f64>,
}

impl DecaySequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("decay sequence must be non-empty"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::validation(format!(
                "decay sequence entries must be positive and finite, got {v}"
            )));
        }
        if values[0] > EPS_CAP {
            return Err(Error::validation(format!(
                "first entry {} exceeds 2^-8",
                values[0]
            )));
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] > w[0] {
                return Err(Error::validation(format!(
                    "sequence increases at index {}",
                    i + 2
                )));
            }
            if w[1] < w[0] / 2.0 {
                return Err(Error::validation(format!(
                    "sequence decays faster than 1/2 at index {}",
                    i + 2
                )));
            }
        }
        Ok(Self { values })
    }

    /// The dyadic instance `ε_i = 2^{-7-i}`, `i = 1..=n`.
    pub fn dyadic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("dyadic sequence needs n >= 1"));
        }
        Self::new((1..=n).map(|i| (-(7.0 + i as f64)).exp2()).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ε_i` for `1 ≤ i ≤ len`.
    pub fn get(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.values.len(), "index {i} out of range");
        self.values[i - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// First `n` terms.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.values.len() {
            return Err(Error::validation(format!(
                "cannot truncate a sequence of length {} to {n}",
                self.values.len()
            )));
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
        })
    }
}

impl TryFrom<Vec<f64>> for DecaySequence {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<DecaySequence> for Vec<f64> {
    fn from(seq: DecaySequence) -> Self {
        seq.values
    }
}

/// `out[i] = min(2^-8, max_{k ≥ i} raw[k])` over the finite list.
pub fn clamp_monotone(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::validation("raw sequence must be non-empty"));
    }
    if let Some(v) = raw.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::validation(format!(
            "raw entries must be positive and finite, got {v}"
        )));
    }
    let mut out = vec![0.0; raw.len()];
    let mut suffix_max = 0.0_f64;
    for (slot, &v) in out.iter_mut().zip(raw).rev() {
        suffix_max = suffix_max.max(v);
        *slot = suffix_max.min(EPS_CAP);
    }
    Ok(out)
}

/// Slow-decay regularization: `out[1] = seq[1]`,
/// `out[i+1] = max(ρ·out[i], seq[i+1])`.
///
/// The result dominates `seq`, is non-increasing, and satisfies
/// `out[i+1] ≥ ρ·out[i]`. It is returned as a [`DecaySequence`], so `ρ < 1/2`
/// is rejected when the recursion does not end up decaying at rate `≥ 1/2`.
pub fn slow_decay(seq: &[f64], rho: f64) -> Result<DecaySequence> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::validation(format!("rho must lie in (0,1), got {rho}")));
    }
    if seq.is_empty() {
        return Err(Error::validation("sequence must be non-empty"));
    }
    if seq.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::validation("sequence must be non-increasing"));
    }
    let mut out = Vec::with_capacity(seq.len());
    out.push(seq[0]);
    for &next in &seq[1..] {
        let prev = *out.last().unwrap();
        out.push((rho * prev).max(next));
    }
    DecaySequence::new(out)
}

/// Clamp then regularize with `ρ = 1/2`.
pub fn regularize(raw: &[f64]) -> Result<DecaySequence> {
    slow_decay(&clamp_monotone(raw)?, 0.5)
}

/// A non-decreasing positive integer sequence `(M_n)_{n ≥ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthSequence {
    /// `M_n = ⌈log₂(n + 1)⌉`.
    Log2,
    /// `M_n = k`.
    Const(u64),
    /// Explicit values `M_1, M_2, …`; the last value is repeated past the end.
    Explicit(Vec<u64>),
}

impl GrowthSequence {
    pub fn validate(&self) -> Result<()> {
        match self {
            GrowthSequence::Log2 => Ok(()),
            GrowthSequence::Const(0) => Err(Error::validation("M must be >= 1")),
            GrowthSequence::Const(_) => Ok(()),
            GrowthSequence::Explicit(v) => {
                if v.is_empty() || v.contains(&0) {
                    return Err(Error::validation(
                        "explicit M sequence must be non-empty with entries >= 1",
                    ));
                }
                if v.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::validation("M sequence must be non-decreasing"));
                }
                Ok(())
            }
        }
    }

    /// `M_n` for `n ≥ 1`.
    pub fn value(&self, n: u64) -> u64 {
        assert!(n >= 1, "M is indexed from 1");
        match self {
            // ⌈log₂(n+1)⌉ = bit length of n
            GrowthSequence::Log2 => u64::from(64 - n.leading_zeros()),
            GrowthSequence::Const(k) => *k,
            GrowthSequence::Explicit(v) => {
                let idx = usize::try_from(n - 1).unwrap_or(usize::MAX);
                *v.get(idx).unwrap_or_else(|| v.last().unwrap())
            }
        }
    }

    /// Tower heights `l_n = min(n, M_n²)`.
    pub fn tower_height(&self, n: u64) -> u64 {
        let m = self.value(n);
        n.min(m.saturating_mul(m))
    }
}

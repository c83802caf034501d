use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::delta_pow;
use crate::seqs::DecaySequence;
use crate::{Error, Result};

/// Largest admissible `δ`; the Schur-test bound on the Gram matrix needs
/// `32·3δ/(1-2δ) ≤ 1/2`.
pub const MAX_DELTA: f64 = 1.0 / 200.0;

/// Number of boundary samples per disk in the inclusion certificate.
const BOUNDARY_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    /// Piecewise linear through `(δ^j, ε_j δ^j)`, `j = n, …, 1`, then on to
    /// `(1, ε_1)`; linear through the origin below `δ^n`.
    /// `anchors` is sorted by increasing abscissa and includes `(1, ε_1)`.
    Anchored {
        delta: f64,
        eps: DecaySequence,
        anchors: Vec<(f64, f64)>,
    },
    /// `θ(h) = coeff · h^exponent`.
    Power { coeff: f64, exponent: f64 },
}

/// The function `θ` bounding the cusp `Ω_θ = {x + iy : 0 < x < 1, |y| < θ(1 - x)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspProfile {
    shape: ProfileShape,
}

impl CuspProfile {
    pub fn anchored(eps: &DecaySequence, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= MAX_DELTA) {
            return Err(Error::validation(format!(
                "delta must lie in (0, 1/200], got {delta}"
            )));
        }
        let n = eps.len();
        let mut anchors: Vec<(f64, f64)> = (1..=n)
            .rev()
            .map(|j| {
                let h = delta_pow(delta, j);
                (h, eps.get(j) * h)
            })
            .collect();
        anchors.push((1.0, eps.get(1)));
        Ok(Self {
            shape: ProfileShape::Anchored {
                delta,
                eps: eps.clone(),
                anchors,
            },
        })
    }

    /// `θ(h) = coeff · h^exponent`, `0 ≤ coeff ≤ 1`, `exponent ≥ 1`.
    pub fn power(coeff: f64, exponent: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&coeff) || !(exponent >= 1.0) || !exponent.is_finite() {
            return Err(Error::validation(format!(
                "power profile needs 0 <= coeff <= 1 and exponent >= 1, got ({coeff}, {exponent})"
            )));
        }
        Ok(Self {
            shape: ProfileShape::Power { coeff, exponent },
        })
    }

    /// `θ(h) = h`: a lens-like corner of half-angle `π/4`.
    pub fn lens() -> Self {
        Self::power(1.0, 1.0).unwrap()
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn delta(&self) -> Option<f64> {
        match &self.shape {
            ProfileShape::Anchored { delta, .. } => Some(*delta),
            ProfileShape::Power { .. } => None,
        }
    }

    pub fn eps(&self) -> Option<&DecaySequence> {
        match &self.shape {
            ProfileShape::Anchored { eps, .. } => Some(eps),
            ProfileShape::Power { .. } => None,
        }
    }

    /// `θ(h)` for `h ∈ (0, 1)`.
    pub fn eval(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::validation(format!("h must lie in (0,1), got {h}")));
        }
        Ok(self.theta(h))
    }

    /// `θ(t)` on `[0, 1]` without validation.
    pub fn theta(&self, t: f64) -> f64 {
        match &self.shape {
            ProfileShape::Anchored { eps, anchors, .. } => {
                let t = t.clamp(0.0, 1.0);
                let idx = anchors.partition_point(|a| a.0 < t);
                if idx < anchors.len() && anchors[idx].0 == t {
                    return anchors[idx].1;
                }
                if idx == 0 {
                    return eps.get(eps.len()) * t;
                }
                let (h0, y0) = anchors[idx - 1];
                let (h1, y1) = anchors[idx];
                y0 + (y1 - y0) * ((t - h0) / (h1 - h0))
            }
            ProfileShape::Power { coeff, exponent } => coeff * t.max(0.0).powf(*exponent),
        }
    }

    /// `∫_a^b θ(t) dt` for `0 ≤ a ≤ b ≤ 1`, in closed form.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match &self.shape {
            ProfileShape::Anchored { .. } => {
                let mut knots = vec![a];
                knots.extend(self.breakpoints().into_iter().filter(|&h| h > a && h < b));
                knots.push(b);
                knots
                    .windows(2)
                    .map(|w| 0.5 * (w[1] - w[0]) * (self.theta(w[0]) + self.theta(w[1])))
                    .sum()
            }
            ProfileShape::Power { coeff, exponent } => {
                let e1 = exponent + 1.0;
                coeff * (b.powf(e1) - a.powf(e1)) / e1
            }
        }
    }

    /// Normalized area `A(Ω_θ) = (2/π) ∫₀¹ θ`.
    pub fn area(&self) -> f64 {
        2.0 * self.integral(0.0, 1.0) / PI
    }

    /// Kinks of `θ` inside `(0, 1)`, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            ProfileShape::Anchored { anchors, .. } => anchors
                .iter()
                .map(|a| a.0)
                .filter(|&h| h > 0.0 && h < 1.0)
                .collect(),
            ProfileShape::Power { .. } => Vec::new(),
        }
    }

    /// Subintervals of `[0, 1]` on which `θ` is smooth and varies on a
    /// single scale: the anchor intervals `[δ^{p+1}, δ^p]` for anchored
    /// profiles, dyadic intervals otherwise.
    pub fn quadrature_pieces(&self) -> Vec<(f64, f64)> {
        let mut knots = vec![0.0];
        match &self.shape {
            ProfileShape::Anchored { .. } => knots.extend(self.breakpoints()),
            ProfileShape::Power { .. } => knots.extend((1..=60).rev().map(|k| (-(k as f64)).exp2())),
        }
        knots.push(1.0);
        knots.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Upper bound on `θ(h)/h` valid around `h`: `ε_j/δ` for
    /// `δ^{j+1} ≤ h ≤ δ^j`, or `None` for non-anchored profiles.
    pub fn ratio_bound(&self, h: f64) -> Option<f64> {
        let ProfileShape::Anchored { delta, eps, .. } = &self.shape else {
            return None;
        };
        let n = eps.len();
        let j = (1..=n)
            .rev()
            .find(|&j| h >= delta_pow(*delta, j + 1) && h <= delta_pow(*delta, j))
            .unwrap_or(if h > *delta { 1 } else { n });
        Some(eps.get(j) / delta)
    }

    /// Membership in `Ω_θ` given `t = 1 - x` and `y`.
    pub fn contains_local(&self, t: f64, y: f64) -> bool {
        t > 0.0 && t < 1.0 && y.abs() < self.theta(t)
    }

    /// `0 < Re z < 1` and `|Im z| < θ(1 - Re z)`.
    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_local(1.0 - z.re, z.im)
    }
}

/// Disjoint disks `Δ_j = D(1 - 2δ^j, ε_j δ^j)` inside `Ω_θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskFamily {
    delta: f64,
    eps: DecaySequence,
    delta_pows: Vec<f64>,
    radii: Vec<f64>,
    profile: CuspProfile,
}

impl DiskFamily {
    /// Builds the first `n` disks and runs the gap and inclusion
    /// certificates, failing with [`Error::Construction`] if either fails.
    pub fn new(eps: &DecaySequence, delta: f64, n: usize) -> Result<Self> {
        let profile = CuspProfile::anchored(eps, delta)?;
        if n == 0 || n > eps.len() {
            return Err(Error::validation(format!(
                "disk count must lie in 1..={}, got {n}",
                eps.len()
            )));
        }
        let delta_pows: Vec<f64> = (1..=n).map(|j| delta_pow(delta, j)).collect();
        let radii = (1..=n).map(|j| eps.get(j) * delta_pows[j - 1]).collect();
        let family = Self {
            delta,
            eps: eps.truncate(n)?,
            delta_pows,
            radii,
            profile,
        };
        family.certify()?;
        Ok(family)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps(&self) -> &DecaySequence {
        &self.eps
    }

    pub fn profile(&self) -> &CuspProfile {
        &self.profile
    }

    /// `δ^j`, `1 ≤ j ≤ n`.
    pub fn delta_pow(&self, j: usize) -> f64 {
        self.delta_pows[j - 1]
    }

    /// `r_j = ε_j δ^j`.
    pub fn radius(&self, j: usize) -> f64 {
        self.radii[j - 1]
    }

    /// `c_j = 1 - 2δ^j`, rounded; use [`Self::delta_pow`] for anything
    /// sensitive to `1 - c_j`.
    pub fn center(&self, j: usize) -> f64 {
        1.0 - 2.0 * self.delta_pow(j)
    }

    /// `ε'_j = r_j / (1 - c_j²)`, computed as `r_j / (2δ^j (2 - 2δ^j))`.
    pub fn eps_prime(&self, j: usize) -> f64 {
        let a = 2.0 * self.delta_pow(j);
        self.radius(j) / (a * (2.0 - a))
    }

    /// Boundary point of `Δ_j` at angle `alpha`, in local coordinates.
    pub fn boundary_local(&self, j: usize, alpha: f64) -> (f64, f64) {
        let r = self.radius(j);
        (2.0 * self.delta_pow(j) - r * alpha.cos(), r * alpha.sin())
    }

    /// Gap margins `c_{j+1} - c_j - (r_j + r_{j+1})`, `j = 1..n-1`.
    pub fn gap_margins(&self) -> Vec<f64> {
        (1..self.len())
            .map(|j| {
                let gap = 2.0 * (self.delta_pow(j) - self.delta_pow(j + 1));
                gap - (self.radius(j) + self.radius(j + 1))
            })
            .collect()
    }

    fn certify(&self) -> Result<()> {
        for (j, margin) in self.gap_margins().into_iter().enumerate() {
            if !(margin > 0.0) {
                return Err(Error::Construction(format!(
                    "disks {} and {} overlap (margin {margin:e})",
                    j + 1,
                    j + 2
                )));
            }
        }
        for j in 1..=self.len() {
            let dj = self.delta_pow(j);
            let cap = self.profile.theta(dj);
            for s in 0..BOUNDARY_SAMPLES {
                let alpha = 2.0 * PI * s as f64 / BOUNDARY_SAMPLES as f64;
                let (t, y) = self.boundary_local(j, alpha);
                if !(t > dj && y.abs() <= cap && self.profile.contains_local(t, y)) {
                    return Err(Error::Construction(format!(
                        "boundary point of disk {j} at angle {alpha} leaves the cusp"
                    )));
                }
            }
        }
        Ok(())
    }
}

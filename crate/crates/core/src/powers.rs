//! Dirichlet norms of symbol powers, by coefficients and by integrating
//! `p² |w|^{2p-2}` against the counting measure of the image region.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::carleson::exp_moment;
use crate::geometry::{CuspProfile, RectilinearDomain};
use crate::quad::{cusp_moment_at, DiskRule, MAX_ORDER};
use crate::seqs::GrowthSequence;
use crate::{Error, Result};

/// Largest degree a power of a polynomial symbol may reach.
pub const MAX_DEGREE: usize = 1 << 20;

/// Taylor coefficients `c₀, …, c_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub dirichlet: f64,
    pub bergman: f64,
    pub hardy: f64,
}

impl CoefficientSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation(
                "coefficient list must be non-empty and finite",
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z^p`.
    pub fn monomial(p: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); p + 1];
        c[p] = Complex64::new(1.0, 0.0);
        Self { coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `‖f‖_D² = |c₀|² + Σ n|c_n|²`, `‖f‖_B² = Σ |c_n|²/(n+1)`,
    /// `‖f‖_{H²}² = Σ |c_n|²`; square roots are returned.
    pub fn norms(&self) -> Norms {
        let mut d = self.coeffs[0].norm_sqr();
        let (mut b, mut h) = (0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate() {
            let a = c.norm_sqr();
            if n > 0 {
                d += n as f64 * a;
            }
            b += a / (n + 1) as f64;
            h += a;
        }
        Norms {
            dirichlet: d.sqrt(),
            bergman: b.sqrt(),
            hardy: h.sqrt(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * n as f64)
                .collect(),
        }
    }

    pub fn pow(&self, p: usize) -> Result<Self> {
        if p == 0 {
            return Ok(Self::monomial(0));
        }
        if self.degree().saturating_mul(p) > MAX_DEGREE {
            return Err(Error::validation(format!(
                "degree {} of the power exceeds {MAX_DEGREE}",
                self.degree().saturating_mul(p)
            )));
        }
        let mut out = self.clone();
        for _ in 1..p {
            out = out.mul(self);
        }
        Ok(out)
    }
}

/// `‖φᵖ‖_D` from the coefficients of `φᵖ`.
pub fn power_norm_series(c: &CoefficientSeries, p: usize) -> Result<f64> {
    if p < 1 {
        return Err(Error::validation("p must be at least 1"));
    }
    Ok(c.pow(p)?.norms().dirichlet)
}

/// Regions carrying the measure `μ = n_φ dA`.
pub trait RadialMoments {
    /// `∫ |w|^{2s} dμ(w)`.
    fn radial_moment(&self, s: u32) -> Result<f64>;
}

/// The unit disk with `n_φ ≡ 1`, integrated by the polar rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitDisk;

impl RadialMoments for UnitDisk {
    fn radial_moment(&self, s: u32) -> Result<f64> {
        let m = (s as usize / 2 + 1).min(MAX_ORDER);
        // Only the radial rule matters; the angular sum is constant.
        let rule = DiskRule::new(m)?;
        let v: Vec<f64> = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(z, w)| z.norm_sqr().powi(s as i32) * w)
            .collect();
        Ok(crate::quad::pairwise_sum(&v))
    }
}

impl RadialMoments for RectilinearDomain {
    /// Exact: `Σ_R (Δy/π) ∫ e^{-2(s+1)x} dx` after `w = e^{-u}`.
    fn radial_moment(&self, s: u32) -> Result<f64> {
        let q = f64::from(s) + 1.0;
        let v: Vec<f64> = self.rects().iter().map(|r| exp_moment(&r.rect, q)).collect();
        Ok(crate::quad::pairwise_sum(&v))
    }
}

impl RadialMoments for CuspProfile {
    /// Piecewise Gauss–Legendre with enough nodes to be exact on each
    /// polynomial piece of the profile.
    fn radial_moment(&self, s: u32) -> Result<f64> {
        if s > 400 {
            return Err(Error::validation("cusp moments are limited to s <= 400"));
        }
        let q = (s as usize + 2).max(16);
        Ok(cusp_moment_at(self, s as usize, s as usize, q)?.re)
    }
}

/// `p² ∫ |w|^{2p-2} dμ`: `‖φᵖ‖_D²` without the `|φ(0)|^{2p}` term.
pub fn power_norm_sq_region(region: &impl RadialMoments, p: u32) -> Result<f64> {
    if p < 1 {
        return Err(Error::validation("p must be at least 1"));
    }
    let pf = f64::from(p);
    Ok(pf * pf * region.radial_moment(p - 1)?)
}

/// Square root of [`power_norm_sq_region`].
pub fn power_norm_region(region: &impl RadialMoments, p: u32) -> Result<f64> {
    Ok(power_norm_sq_region(region, p)?.sqrt())
}

/// Jensen's inequality on `μ/μ(𝔻)`:
/// `p² ∫|w|^{2p-2} dμ ≥ p² μ(𝔻) (m₂/μ(𝔻))^{p-1}`, `m₂ = ∫|w|² dμ`.
/// Returns `(lower, actual)`.
pub fn jensen_lower(region: &impl RadialMoments, p: u32) -> Result<(f64, f64)> {
    let mass = region.radial_moment(0)?;
    let m2 = region.radial_moment(1)?;
    let actual = power_norm_sq_region(region, p)?;
    let pf = f64::from(p);
    let lower = pf * pf * mass * (m2 / mass).powi(p as i32 - 1);
    Ok((lower, actual))
}

/// `F(x) = x² e^{-x}`.
pub fn f_kernel(x: f64) -> f64 {
    x * x * (-x).exp()
}

/// `Σ_{n=1}^{terms} F(p / 4ⁿ)`.
pub fn f_sum(p: f64, terms: u32) -> f64 {
    (1..=terms).map(|n| f_kernel(p * (-2.0 * f64::from(n)).exp2())).sum()
}

/// Dense for `p ≤ 128`, then doubling, up to `p_max` (inclusive if hit).
pub fn p_grid(p_max: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=p_max.min(128)).collect();
    let mut p = 256;
    while p <= p_max {
        v.push(p);
        p *= 2;
    }
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub p: u64,
    /// `‖φᵖ‖_D` without the constant term.
    pub norm: f64,
    /// `p² Σ_{n≤n_max} l_n 16⁻ⁿ e^{-p 4⁻ⁿ} + p² Σ_{n>n_max} l_n 16⁻ⁿ`.
    pub majorant: f64,
    pub m_p: u64,
    /// `norm / M_p`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Grid supremum of `norm² / majorant`.
    pub k_const: f64,
    /// Grid supremum of `norm / M_p`.
    pub c_const: f64,
    /// `Σ_{n>n_max} l_n 16⁻ⁿ` bound used for the truncated tail.
    pub tail: f64,
}

pub fn eksy_growth_report(
    f: &RectilinearDomain,
    growth: &GrowthSequence,
    p_max: u64,
) -> Result<GrowthReport> {
    use rayon::prelude::*;

    growth.validate()?;
    if p_max < 1 || p_max > u64::from(u32::MAX) {
        return Err(Error::validation("p_max must lie in 1..=2^32-1"));
    }
    let tail = f.tail_bound();
    let heights = f.heights().to_vec();
    let rows: Vec<GrowthRow> = p_grid(p_max)
        .into_par_iter()
        .map(|p| -> Result<GrowthRow> {
            let norm = power_norm_region(f, p as u32)?;
            let pf = p as f64;
            let sum: f64 = heights
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let n = (i + 1) as f64;
                    l as f64 * (-4.0 * n).exp2() * (-pf * (-2.0 * n).exp2()).exp()
                })
                .sum();
            let majorant = pf * pf * (sum + tail);
            let m_p = growth.value(p);
            Ok(GrowthRow {
                p,
                norm,
                majorant,
                m_p,
                ratio: norm / m_p as f64,
            })
        })
        .collect::<Result<_>>()?;
    let k_const = rows
        .iter()
        .map(|r| r.norm * r.norm / r.majorant)
        .fold(0.0, f64::max);
    let c_const = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(GrowthReport {
        rows,
        k_const,
        c_const,
        tail,
    })
}

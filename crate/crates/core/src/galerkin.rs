//! Compressions of `T_μ` to the span of the orthonormal Bergman monomials
//! `e_k = √(k+1) z^k`, `k < K`.

use serde::Serialize;

use crate::geometry::CuspProfile;
use crate::quad::{cusp_moment_block, DiskRule, MAX_ORDER};
use crate::spectra::{eigh, DenseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum MomentRegion {
    Cusp(CuspProfile),
    /// `n_φ ≡ 1` on the whole disk.
    UnitDisk,
}

/// `t_{jk} = √((j+1)(k+1)) μ̂_{jk}` with `μ̂_{jk} = ∫ w^k w̄^j dμ`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    k: usize,
    /// `μ̂_{jk}`, row-major.
    moments: Vec<f64>,
    t: DenseMatrix,
    eigenvalues: Vec<f64>,
}

impl MomentMatrix {
    fn from_moments(k: usize, moments: Vec<f64>) -> Result<Self> {
        let t = DenseMatrix::from_fn(k, k, |j, l| {
            (((j + 1) * (l + 1)) as f64).sqrt() * moments[j * k + l]
        });
        let eigenvalues = eigh(&t)?;
        let trace = t.trace();
        let lmin = *eigenvalues.last().unwrap();
        if lmin < -1e-12 * trace {
            return Err(Error::integrity(format!(
                "moment matrix is not positive semidefinite: lambda_min = {lmin:e}"
            )));
        }
        Ok(Self {
            k,
            moments,
            t,
            eigenvalues,
        })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.t
    }

    /// `μ̂_{jk}`, 0-based.
    pub fn moment(&self, j: usize, k: usize) -> f64 {
        self.moments[j * self.k + k]
    }

    /// Non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `Σ_{k<K} (k+1) μ̂_{kk}`.
    pub fn moment_trace(&self) -> f64 {
        (0..self.k).map(|k| (k + 1) as f64 * self.moment(k, k)).sum()
    }

    /// Leading `K' × K'` compression, sharing the same moments.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k < 1 || k > self.k {
            return Err(Error::validation(format!(
                "truncation must lie in 1..={}",
                self.k
            )));
        }
        let moments = (0..k)
            .flat_map(|j| (0..k).map(move |l| (j, l)))
            .map(|(j, l)| self.moment(j, l))
            .collect();
        Self::from_moments(k, moments)
    }
}

/// Assembles the `K × K` compression. Cusp moments use `max(order, K)`
/// Gauss nodes per profile piece in each variable, which is exact on the
/// polynomial integrand.
pub fn moment_matrix(region: &MomentRegion, k: usize, order: usize) -> Result<MomentMatrix> {
    if k < 1 || k > 400 {
        return Err(Error::validation("K must lie in 1..=400"));
    }
    let q = order.max(k);
    if q > MAX_ORDER {
        return Err(Error::validation(format!("order is capped at {MAX_ORDER}")));
    }
    let moments = match region {
        MomentRegion::Cusp(p) => cusp_moment_block(p, k, q)?,
        MomentRegion::UnitDisk => disk_moments(k)?,
    };
    MomentMatrix::from_moments(k, moments)
}

/// `∫_𝔻 w^k w̄^j dA` with the polar rule, exact for `j, k < K`.
fn disk_moments(k: usize) -> Result<Vec<f64>> {
    let rule = DiskRule::new(k)?;
    let mut out = vec![0.0; k * k];
    let mut pw = vec![num_complex::Complex64::new(0.0, 0.0); k];
    for (z, w) in rule.points.iter().zip(&rule.weights) {
        let mut p = num_complex::Complex64::new(1.0, 0.0);
        for v in pw.iter_mut() {
            *v = p;
            p *= z;
        }
        for j in 0..k {
            for l in 0..k {
                out[j * k + l] += w * (pw[l] * pw[j].conj()).re;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GalerkinRow {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// `ε_n² / 64`.
    pub floor: f64,
    pub crossed: bool,
}

/// `λ_n^{(K)}` against `ε_n²/64` for `n ≤ min(K, len(floors))`.
pub fn floor_rows(m: &MomentMatrix, eps: &[f64]) -> Vec<GalerkinRow> {
    eps.iter()
        .take(m.size())
        .enumerate()
        .map(|(i, e)| {
            let lambda = m.eigenvalues()[i];
            let floor = e * e / 64.0;
            GalerkinRow {
                n: i + 1,
                k: m.size(),
                lambda,
                floor,
                crossed: lambda >= floor,
            }
        })
        .collect()
}

//! Dense real eigenvalues, singular values, Schur-test norm bounds and the
//! Neumann lower bound `σ_min(D(I + N)) ≥ d_min (1 - ‖N‖)`.

use crate::{Error, Result};

/// Real dense matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 1.0;
        }
        a
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut a = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            a[(i, i)] = v;
        }
        a
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::validation(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::validation("matrix dimensions do not agree"));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// `‖A - Aᵀ‖_max ≤ 10⁻¹² ‖A‖_max`.
    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = 1e-12 * self.max_abs();
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Leading principal `k × k` submatrix.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a symmetric matrix, non-increasing, by cyclic Jacobi.
///
/// A rotation is skipped only when `|a_pq| ≤ 10⁻¹⁶ √|a_pp a_qq|`, which keeps
/// small eigenvalues of graded positive definite matrices to high relative
/// accuracy. Sweeps stop once no rotation fires and the off-diagonal mass is
/// below `10⁻¹³ ‖A‖_F`.
pub fn eigh(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_symmetric() {
        return Err(Error::validation("eigh needs a symmetric matrix"));
    }
    let n = a.rows;
    let mut m = a.clone();
    // Symmetrize exactly so rotations stay consistent.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let fro = a.frobenius();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (m[(p, p)], m[(q, q)]);
                if apq.abs() <= 1e-16 * (app * aqq).abs().sqrt() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if !rotated && off <= 1e-13 * fro {
            return Ok(sorted_desc(m.diag()));
        }
    }
    Err(Error::integrity("Jacobi iteration did not converge"))
}

fn sorted_desc(v: Vec<f64>) -> Vec<f64> {
    let mut idx: Vec<(usize, f64)> = v.into_iter().enumerate().collect();
    idx.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    idx.into_iter().map(|(_, x)| x).collect()
}

/// Singular values, non-increasing: `|λ|` for symmetric input, otherwise
/// `√eig(AᵀA)`.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.is_symmetric() {
        let mut s: Vec<f64> = eigh(a)?.into_iter().map(f64::abs).collect();
        s.sort_by(|x, y| y.total_cmp(x));
        return Ok(s);
    }
    let ata = a.transpose().matmul(a)?;
    let mut s: Vec<f64> = eigh(&ata)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s.truncate(a.rows.min(a.cols));
    Ok(s)
}

/// Schur test: `√(α β)` with `α` the largest absolute row sum and `β` the
/// largest absolute column sum. Always `≥ ‖A‖₂`.
pub fn schur_bound(a: &DenseMatrix) -> f64 {
    let alpha = (0..a.rows)
        .map(|i| (0..a.cols).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let beta = (0..a.cols)
        .map(|j| (0..a.rows).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (alpha * beta).sqrt()
}

/// Lower bounds `b_k(D(I + N)) ≥ d_(k) (1 - q)` for `k = 1..n`, where
/// `d_(k)` is the `k`-th largest diagonal entry and `q ≥ ‖N‖`.
pub fn neumann_lower(diag: &[f64], q: f64) -> Result<Vec<f64>> {
    if !(q < 1.0) {
        return Err(Error::Inapplicable(format!(
            "Neumann bound needs ||N|| < 1, got bound {q}"
        )));
    }
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::validation("diagonal entries must be positive"));
    }
    let q = q.max(0.0);
    let mut d = diag.to_vec();
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d.into_iter().map(|v| v * (1.0 - q)).collect())
}

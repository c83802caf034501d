//! Gram matrices of the normalized disk indicators `f_j = 1_{Δ_j} / r_j`
//! under the Bergman kernel, and the certificate chain built on them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::DiskFamily;
use crate::quad::{CenteredKernel, DiskRule, DOUBLING_TOL, MAX_ORDER};
use crate::report::{Certificate, CertificateReport, Relation};
use crate::spectra::{eigh, neumann_lower, schur_bound, singular_values, DenseMatrix};
use crate::{Error, Result};

/// `m_{i,j} = (1/(r_i r_j)) ∬_{Δ_i×Δ_j} dA(z) dA(w) / (1 - w z̄)²`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    family: DiskFamily,
    order: usize,
    entries: DenseMatrix,
    /// Non-increasing.
    eigenvalues: Vec<f64>,
    /// Largest `|Im m_ij| / |m_ij|` seen during assembly.
    imag_residue: f64,
}

/// Entry-wise comparison of two quadrature orders.
#[derive(Debug, Clone, Serialize)]
pub struct DoublingCheck {
    pub order: usize,
    pub refined_order: usize,
    /// `|m(2m) - m(m)| / |m(2m)|`, row-major.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

impl DoublingCheck {
    pub fn stable(&self) -> bool {
        self.max_residual < DOUBLING_TOL
    }
}

impl GramMatrix {
    pub fn family(&self) -> &DiskFamily {
        &self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `m_{i,j}`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1, j - 1)]
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty Gram matrix")
    }

    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    pub fn diag(&self) -> Vec<f64> {
        self.entries.diag()
    }

    /// `ν = D⁻¹ R`: `ν_{i,j} = m_{i,j} / m_{i,i}` off the diagonal, zero on it.
    pub fn nu(&self) -> DenseMatrix {
        let n = self.len();
        DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                self.entries[(i, j)] / self.entries[(i, i)]
            }
        })
    }

    /// Rebuilds at twice the order and compares entries.
    pub fn doubling_check(&self) -> Result<DoublingCheck> {
        let refined = build_gram(&self.family, 2 * self.order)?;
        let residuals: Vec<f64> = self
            .entries
            .as_slice()
            .iter()
            .zip(refined.entries.as_slice())
            .map(|(a, b)| (a - b).abs() / b.abs())
            .collect();
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        Ok(DoublingCheck {
            order: self.order,
            refined_order: refined.order,
            residuals,
            max_residual,
        })
    }
}

/// Assembles the Gram matrix of `family` with the polar disk rule of order
/// `m` in both variables.
pub fn build_gram(family: &DiskFamily, m: usize) -> Result<GramMatrix> {
    if m < 1 || m > MAX_ORDER {
        return Err(Error::validation(format!(
            "quadrature order must lie in 1..={MAX_ORDER}"
        )));
    }
    let n = family.len();
    let rule = DiskRule::new(m)?;
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i..=n).map(move |j| (i, j)))
        .collect();
    let values: Vec<Result<Complex64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let kernel = CenteredKernel::new(family, i, j)?;
            let integral = kernel_integral(&kernel, &rule)?;
            Ok(integral * (family.radius(i) * family.radius(j)))
        })
        .collect();

    let mut entries = DenseMatrix::zeros(n, n);
    let mut imag_residue: f64 = 0.0;
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        let rel = v.im.abs() / v.norm();
        if rel > 1e-12 {
            return Err(Error::integrity(format!(
                "Gram entry ({i}, {j}) has imaginary residue {rel:e}"
            )));
        }
        imag_residue = imag_residue.max(rel);
        entries[(i - 1, j - 1)] = v.re;
        entries[(j - 1, i - 1)] = v.re;
    }
    if let Some(i) = entries.diag().iter().position(|&d| !(d > 0.0)) {
        return Err(Error::integrity(format!(
            "Gram diagonal entry {} is not positive",
            i + 1
        )));
    }
    let eigenvalues = eigh(&entries)?;
    let trace = entries.trace();
    let lmin = *eigenvalues.last().unwrap();
    if lmin < -1e-14 * trace {
        return Err(Error::integrity(format!(
            "Gram matrix is not positive semidefinite: lambda_min = {lmin:e}"
        )));
    }
    Ok(GramMatrix {
        family: family.clone(),
        order: m,
        entries,
        eigenvalues,
        imag_residue,
    })
}

/// `∬_{𝔻×𝔻} dA(ξ) dA(ζ) / (s - a ξ̄ - b ζ - g ξ̄ ζ)²` by the tensor disk rule.
///
/// The rule is invariant under conjugation and `K(ξ̄, ζ̄) = conj K(ξ, ζ)`, so
/// outer nodes with `Im ξ < 0` are folded onto their mirror images.
fn kernel_integral(k: &CenteredKernel, rule: &DiskRule) -> Result<Complex64> {
    let zr: Vec<f64> = rule.points.iter().map(|z| z.re).collect();
    let zi: Vec<f64> = rule.points.iter().map(|z| z.im).collect();
    let w = &rule.weights;
    let mut rows: Vec<Complex64> = Vec::with_capacity(rule.points.len() / 2 + 2);
    let mut min_d2 = f64::INFINITY;
    for (xi, &wx) in rule.points.iter().zip(&rule.weights) {
        if xi.im < 0.0 {
            continue;
        }
        let xb = xi.conj();
        // 1 - w z̄ = A - B ζ.
        let a = Complex64::new(k.s, 0.0) - xb * k.a;
        let b = xb * k.g + k.b;
        let (mut re, mut im) = (0.0, 0.0);
        for q in 0..zr.len() {
            let dr = a.re - (b.re * zr[q] - b.im * zi[q]);
            let di = a.im - (b.re * zi[q] + b.im * zr[q]);
            let n2 = dr * dr + di * di;
            min_d2 = min_d2.min(n2);
            let inv = w[q] / (n2 * n2);
            re += (dr * dr - di * di) * inv;
            im -= 2.0 * dr * di * inv;
        }
        let inner = Complex64::new(re, im) * wx;
        rows.push(if xi.im > 0.0 {
            Complex64::new(2.0 * inner.re, 0.0)
        } else {
            inner
        });
    }
    if min_d2.sqrt() < k.floor {
        return Err(Error::integrity(format!(
            "|1 - w conj(z)| = {:e} fell below the floor {:e}",
            min_d2.sqrt(),
            k.floor
        )));
    }
    Ok(crate::quad::pairwise_sum_complex(&rows))
}

/// Diagonal-dominance inequalities, evaluated on a Gram matrix.
#[derive(Debug, Clone, Serialize)]
pub struct TecReport {
    /// `ε'_i = r_i / (1 - c_i²)`.
    pub eps_prime: Vec<f64>,
    /// Row-major `ν`.
    pub nu: Vec<f64>,
    /// Row-major bounds on `|ν_{i,j}|`; zero on the diagonal.
    pub nu_bounds: Vec<f64>,
    pub certificates: CertificateReport,
}

impl TecReport {
    pub fn all_pass(&self) -> bool {
        self.certificates.all_pass()
    }
}

pub fn tec_report(g: &GramMatrix) -> TecReport {
    let fam = g.family();
    let n = g.len();
    let delta = fam.delta();
    let eps = |i: usize| fam.eps().get(i);
    let mut rep = CertificateReport::default();
    let eps_prime: Vec<f64> = (1..=n).map(|i| fam.eps_prime(i)).collect();

    for i in 1..=n {
        let m = g.entry(i, i);
        rep.push(Certificate::new(
            format!("diag_lower[{i}]"),
            m,
            Relation::AtLeast,
            eps(i) * eps(i) / 32.0,
            "quadrature",
        ));
        let ep = eps_prime[i - 1];
        // 32 r³/(1 - c)³ with 1 - c = 2δ^i.
        let r = fam.radius(i);
        let one_minus_c = 2.0 * fam.delta_pow(i);
        rep.push(Certificate::new(
            format!("diag_close[{i}]"),
            (m - ep * ep).abs(),
            Relation::AtMost,
            32.0 * (r / one_minus_c).powi(3),
            "quadrature",
        ));
        rep.push(Certificate::new(
            format!("eps_prime_lower[{i}]"),
            ep,
            Relation::AtLeast,
            eps(i) / 4.0,
            "closed form",
        ));
        rep.push(Certificate::new(
            format!("eps_prime_upper[{i}]"),
            ep,
            Relation::AtMost,
            eps(i) / 2.0,
            "closed form",
        ));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            rep.push(Certificate::new(
                format!("offdiag[{i},{j}]"),
                g.entry(i, j).abs(),
                Relation::AtMost,
                eps(i) * eps(j) * delta.powi((j - i) as i32),
                "quadrature",
            ));
        }
    }

    let nu = g.nu();
    let mut nu_bounds = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let bound = if i < j {
                32.0 * delta.powi((j - i) as i32)
            } else {
                32.0 * (2.0 * delta).powi((i - j) as i32)
            };
            nu_bounds[i * n + j] = bound;
            rep.push(Certificate::new(
                format!("nu[{},{}]", i + 1, j + 1),
                nu[(i, j)].abs(),
                Relation::AtMost,
                bound,
                "quadrature",
            ));
        }
    }
    let row_max = (0..n)
        .map(|i| (0..n).map(|j| nu[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let col_max = (0..n)
        .map(|j| (0..n).map(|i| nu[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    rep.push(Certificate::new(
        "nu_row_sum",
        row_max,
        Relation::AtMost,
        0.5,
        "quadrature",
    ));
    rep.push(Certificate::new(
        "nu_col_sum",
        col_max,
        Relation::AtMost,
        0.5,
        "quadrature",
    ));

    TecReport {
        eps_prime,
        nu: nu.as_slice().to_vec(),
        nu_bounds,
        certificates: rep,
    }
}

/// Summary numbers behind [`bernstein_certificate`].
#[derive(Debug, Clone, Serialize)]
pub struct BernsteinSummary {
    /// Schur bound on `‖D⁻¹R‖`.
    pub schur: f64,
    /// Spectral norm of `D⁻¹R`.
    pub nu_norm: f64,
    /// `(1 - schur) · min m_{i,i}`, if `schur < 1`.
    pub certified: Option<f64>,
    /// Neumann bounds `b_k(M) ≥ d_(k) (1 - schur)`.
    pub neumann: Option<Vec<f64>>,
    pub lambda_min: f64,
    pub min_diag: f64,
    /// `ε_n² / 64`.
    pub floor_sq: f64,
    /// `ε_n / 8`.
    pub floor: f64,
}

/// Lower bound chain for `λ_min(M)`: Schur test on `ν`, Neumann bound, direct
/// eigenvalue, and the targets `ε_n²/64` and `ε_n/8`.
pub fn bernstein_certificate(g: &GramMatrix) -> Result<(BernsteinSummary, CertificateReport)> {
    let n = g.len();
    let eps_n = g.family().eps().get(n);
    let nu = g.nu();
    let schur = schur_bound(&nu);
    let nu_norm = singular_values(&nu)?[0];
    let diag = g.diag();
    let min_diag = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_min = g.lambda_min();
    let floor_sq = eps_n * eps_n / 64.0;
    let floor = eps_n / 8.0;

    let mut rep = CertificateReport::default();
    rep.push(Certificate::new(
        "schur_nu",
        schur,
        Relation::AtMost,
        0.5,
        "row/column sums",
    ));
    rep.push(Certificate::new(
        "schur_soundness",
        nu_norm,
        Relation::AtMost,
        schur,
        "Jacobi singular values",
    ));
    let (certified, neumann) = match neumann_lower(&diag, schur) {
        Ok(b) => {
            let c = (1.0 - schur) * min_diag;
            rep.push(Certificate::new(
                "certified_floor",
                c,
                Relation::AtLeast,
                floor_sq,
                "Neumann bound",
            ));
            rep.push(Certificate::new(
                "certified_sound",
                lambda_min,
                Relation::AtLeast,
                c,
                "Jacobi eigenvalues",
            ));
            rep.push(Certificate::new(
                "neumann_half_diag",
                b[n - 1],
                Relation::AtLeast,
                diag[n - 1] / 2.0,
                "Neumann bound",
            ));
            (Some(c), Some(b))
        }
        Err(Error::Inapplicable(msg)) => {
            rep.push(Certificate::inapplicable("certified_floor", msg));
            (None, None)
        }
        Err(e) => return Err(e),
    };
    rep.push(Certificate::new(
        "lambda_min_floor",
        lambda_min,
        Relation::AtLeast,
        floor_sq,
        "Jacobi eigenvalues",
    ));
    rep.push(Certificate::new(
        "sqrt_lambda_min_floor",
        lambda_min.max(0.0).sqrt(),
        Relation::AtLeast,
        floor,
        "Jacobi eigenvalues",
    ));
    rep.push(Certificate::new(
        "lambda_min_below_diag",
        lambda_min,
        Relation::AtMost,
        min_diag,
        "Jacobi eigenvalues",
    ));
    Ok((
        BernsteinSummary {
            schur,
            nu_norm,
            certified,
            neumann,
            lambda_min,
            min_diag,
            floor_sq,
            floor,
        },
        rep,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_disk;
    use crate::seqs::DecaySequence;

    fn family(n: usize) -> DiskFamily {
        DiskFamily::new(&DecaySequence::dyadic(n).unwrap(), 1.0 / 200.0, n).unwrap()
    }

    /// Mean-value property: the kernel is anti-analytic in `z` and analytic
    /// in `w`, so the double average equals its value at the centers.
    fn mean_value_entry(f: &DiskFamily, i: usize, j: usize) -> f64 {
        let (di, dj) = (f.delta_pow(i), f.delta_pow(j));
        // 1 - c_i c_j with c = 1 - 2δ^k, expanded.
        let s = 2.0 * di + 2.0 * dj - 4.0 * di * dj;
        f.radius(i) * f.radius(j) / (s * s)
    }

    #[test]
    fn single_disk() {
        let f = family(1);
        let g = build_gram(&f, 16).unwrap();
        let ep = f.eps_prime(1);
        assert!((ep - 9.815e-4).abs() < 1e-6);
        let m = g.entry(1, 1);
        assert!(m >= 0.5 * ep * ep && m <= 1.5 * ep * ep);
        assert!((m - 9.63e-7).abs() < 0.01e-7);
    }

    #[test]
    fn matches_mean_value_oracle() {
        let f = family(6);
        let g = build_gram(&f, 12).unwrap();
        for i in 1..=6 {
            for j in 1..=6 {
                let exact = mean_value_entry(&f, i.min(j), i.max(j));
                let rel = (g.entry(i, j) - exact).abs() / exact;
                assert!(rel < 1e-12, "({i},{j}) rel {rel:e}");
            }
        }
        assert!(g.imag_residue() <= 1e-12);
    }

    #[test]
    fn indicators_orthonormal() {
        let f = family(8);
        for j in 1..=8 {
            let r = f.radius(j);
            let v = integrate_disk(
                |_| Complex64::new(1.0 / (r * r), 0.0),
                Complex64::new(f.center(j), 0.0),
                r,
                8,
            )
            .unwrap();
            assert!((v.re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tec_and_certificate_small() {
        let f = family(4);
        let g = build_gram(&f, 8).unwrap();
        let tec = tec_report(&g);
        assert!(tec.all_pass(), "{}", tec.certificates.render());
        let (s, rep) = bernstein_certificate(&g).unwrap();
        assert!(rep.all_pass(), "{}", rep.render());
        assert!(s.certified.unwrap() <= s.lambda_min);
        assert!(s.lambda_min <= s.min_diag);
    }

    #[test]
    fn diagonal_gram_certificate_is_min_diag() {
        let f = family(1);
        let g = build_gram(&f, 8).unwrap();
        let (s, _) = bernstein_certificate(&g).unwrap();
        assert_eq!(s.schur, 0.0);
        assert_eq!(s.certified, Some(s.min_diag));
    }

    #[test]
    fn doubling_is_stable() {
        let g = build_gram(&family(3), 6).unwrap();
        let d = g.doubling_check().unwrap();
        assert_eq!(d.refined_order, 12);
        assert!(d.stable(), "{}", d.max_residual);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(build_gram(&family(2), 0).is_err());
        assert!(build_gram(&family(2), 1024).is_err());
    }
}

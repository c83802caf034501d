//! Quadrature: Gauss–Legendre rules, tensor rules on rectangles and disks,
//! the cancellation-free Bergman kernel between two disks of a
//! [`DiskFamily`], and moments of the area measure of a cusp domain.
//!
//! All area integrals use the normalized measure `dA = dx dy / π`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{CuspProfile, DiskFamily};
use crate::{Error, Result};

/// Relative change under order doubling above which a result is flagged.
pub const DOUBLING_TOL: f64 = 1e-8;
/// Largest order the automatic doubling is allowed to reach.
pub const MAX_ORDER: usize = 512;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.mapped(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }

    /// Shared instance of the `m`-point rule.
    pub fn cached(m: usize) -> Result<Arc<GaussRule>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rule) = cache.lock().unwrap().get(&m) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(gauss_nodes(m)?);
        cache.lock().unwrap().insert(m, Arc::clone(&rule));
        Ok(rule)
    }
}

/// `m`-point Gauss–Legendre rule, nodes ascending.
pub fn gauss_nodes(m: usize) -> Result<GaussRule> {
    if m < 1 {
        return Err(Error::validation("Gauss rule needs m >= 1"));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        if d.is_finite() {
            dp = d;
        }
        if 2 * i + 1 == m {
            z = 0.0;
            dp = legendre_with_derivative(m, 0.0).1;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    Ok(GaussRule { nodes, weights })
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=m {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    let d = m as f64 * (z * p1 - p2) / (z * z - 1.0);
    (p1, d)
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn pairwise_sum_complex(v: &[Complex64]) -> Complex64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum_complex(a) + pairwise_sum_complex(b)
}

/// Adaptive Gauss–Legendre integration by interval bisection.
///
/// A panel is accepted once its 10-point value agrees with the sum over its
/// two halves to `max(abs_tol, rel_tol·|value|)`.
pub fn adaptive_gauss(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    let rule = GaussRule::cached(10).expect("10-point rule");
    fn recurse(
        f: &impl Fn(f64) -> f64,
        rule: &GaussRule,
        a: f64,
        b: f64,
        whole: f64,
        abs_tol: f64,
        rel_tol: f64,
        depth: u32,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = rule.integrate(a, mid, f);
        let right = rule.integrate(mid, b, f);
        let both = left + right;
        if depth >= 48 || (both - whole).abs() <= abs_tol.max(rel_tol * both.abs()) {
            return both;
        }
        recurse(f, rule, a, mid, left, abs_tol / 2.0, rel_tol, depth + 1)
            + recurse(f, rule, mid, b, right, abs_tol / 2.0, rel_tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    let whole = rule.integrate(a, b, f);
    recurse(f, &rule, a, b, whole, abs_tol, rel_tol, 0)
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }

    /// Closed intersection, `None` if it has empty interior.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x0.max(other.x0),
            self.x1.min(other.x1),
            self.y0.max(other.y0),
            self.y1.min(other.y1),
        );
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }
}

/// Tensor Gauss–Legendre integral of `f` over `rect`, with respect to the
/// plain Lebesgue measure `dx dy`.
pub fn integrate_rect(
    f: impl Fn(f64, f64) -> Complex64,
    rect: &Rect,
    m: usize,
) -> Result<Complex64> {
    if rect.width() == 0.0 || rect.height() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = GaussRule::cached(m)?;
    let rows: Vec<Complex64> = rule
        .mapped(rect.x0, rect.x1)
        .map(|(x, wx)| {
            let col: Vec<Complex64> = rule
                .mapped(rect.y0, rect.y1)
                .map(|(y, wy)| f(x, y) * wy)
                .collect();
            pairwise_sum_complex(&col) * wx
        })
        .collect();
    Ok(pairwise_sum_complex(&rows))
}

/// [`integrate_rect`] with recursive bisection of the x-range until the
/// halves agree with the parent panel to `rel_tol`.
pub fn integrate_rect_adaptive(
    f: &impl Fn(f64, f64) -> Complex64,
    rect: &Rect,
    m: usize,
    rel_tol: f64,
) -> Result<Complex64> {
    fn recurse(
        f: &impl Fn(f64, f64) -> Complex64,
        rect: &Rect,
        whole: Complex64,
        m: usize,
        rel_tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let mid = 0.5 * (rect.x0 + rect.x1);
        let left = Rect::new(rect.x0, mid, rect.y0, rect.y1);
        let right = Rect::new(mid, rect.x1, rect.y0, rect.y1);
        let l = integrate_rect(f, &left, m)?;
        let r = integrate_rect(f, &right, m)?;
        let both = l + r;
        if depth >= 40 || (both - whole).norm() <= rel_tol * both.norm() {
            return Ok(both);
        }
        Ok(recurse(f, &left, l, m, rel_tol, depth + 1)?
            + recurse(f, &right, r, m, rel_tol, depth + 1)?)
    }
    let whole = integrate_rect(f, rect, m)?;
    if whole.norm() == 0.0 {
        return Ok(whole);
    }
    recurse(f, rect, whole, m, rel_tol, 0)
}

/// Product rule on the closed unit disk for the normalized area measure:
/// Gauss–Legendre in `u = r²` and the trapezoidal rule with `4m` angles.
/// Weights sum to `A(𝔻) = 1`.
#[derive(Debug, Clone)]
pub struct DiskRule {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl DiskRule {
    pub fn new(m: usize) -> Result<Self> {
        let rule = GaussRule::cached(m)?;
        let n_ang = 4 * m;
        let mut points = Vec::with_capacity(m * n_ang);
        let mut weights = Vec::with_capacity(m * n_ang);
        for (u, wu) in rule.mapped(0.0, 1.0) {
            let rho = u.sqrt();
            // Mirror the upper half so the node set is exactly closed
            // under conjugation.
            for k in 0..n_ang {
                let z = if k == 0 {
                    Complex64::new(rho, 0.0)
                } else if 2 * k == n_ang {
                    Complex64::new(-rho, 0.0)
                } else if 2 * k < n_ang {
                    Complex64::from_polar(rho, 2.0 * PI * k as f64 / n_ang as f64)
                } else {
                    Complex64::from_polar(rho, 2.0 * PI * (n_ang - k) as f64 / n_ang as f64).conj()
                };
                points.push(z);
                weights.push(wu / n_ang as f64);
            }
        }
        Ok(Self { points, weights })
    }
}

/// `∫_{D(center, radius)} f dA` with the polar product rule of order `m`.
pub fn integrate_disk(
    f: impl Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    m: usize,
) -> Result<Complex64> {
    if !(radius > 0.0) {
        return Err(Error::validation(format!(
            "disk radius must be positive, got {radius}"
        )));
    }
    let rule = DiskRule::new(m)?;
    let terms: Vec<Complex64> = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(xi, w)| f(center + radius * xi) * *w)
        .collect();
    Ok(pairwise_sum_complex(&terms) * (radius * radius))
}

/// Bergman kernel `1/(1 - w z̄)²` between disks `Δ_i` and `Δ_j` of a family,
/// parameterized by `z = c_i + r_i ξ`, `w = c_j + r_j ζ`.
///
/// The denominator is expanded around the centers,
/// `1 - w z̄ = s - a ξ̄ - b ζ - g ξ̄ ζ` with `s = 2δ^i + (1 - 2δ^i) 2δ^j`,
/// so no digits are lost when both centers are within `10^-16` of `1`.
#[derive(Debug, Clone, Copy)]
pub struct CenteredKernel {
    pub(crate) s: f64,
    pub(crate) a: f64,
    pub(crate) b: f64,
    pub(crate) g: f64,
    /// `δ^i (1 - 10^-8)`, lower bound on `|1 - w z̄|`.
    pub(crate) floor: f64,
}

impl CenteredKernel {
    /// Kernel for the pair `(i, j)` with `1 ≤ i ≤ j ≤ n`.
    pub fn new(family: &DiskFamily, i: usize, j: usize) -> Result<Self> {
        if i < 1 || i > j || j > family.len() {
            return Err(Error::validation(format!(
                "kernel indices must satisfy 1 <= i <= j <= {}, got ({i}, {j})",
                family.len()
            )));
        }
        let di = family.delta_pow(i);
        let dj = family.delta_pow(j);
        let (ri, rj) = (family.radius(i), family.radius(j));
        let (ci, cj) = (1.0 - 2.0 * di, 1.0 - 2.0 * dj);
        Ok(Self {
            s: 2.0 * di + (1.0 - 2.0 * di) * 2.0 * dj,
            a: cj * ri,
            b: ci * rj,
            g: ri * rj,
            floor: di * (1.0 - 1e-8),
        })
    }

    /// `1 - w z̄`.
    pub fn denominator(&self, xi: Complex64, zeta: Complex64) -> Complex64 {
        let xb = xi.conj();
        Complex64::new(self.s, 0.0) - xb * self.a - zeta * self.b - xb * zeta * self.g
    }

    pub fn eval(&self, xi: Complex64, zeta: Complex64) -> Result<Complex64> {
        let d = self.denominator(xi, zeta);
        if d.norm() < self.floor {
            return Err(Error::integrity(format!(
                "|1 - w conj(z)| = {:e} fell below the floor {:e}",
                d.norm(),
                self.floor
            )));
        }
        Ok((d * d).inv())
    }
}

/// `1/(1 - w z̄)²` for `z = c_i + r_i ξ`, `w = c_j + r_j ζ`, `i ≤ j`.
pub fn kernel_centered(
    i: usize,
    j: usize,
    xi: Complex64,
    zeta: Complex64,
    family: &DiskFamily,
) -> Result<Complex64> {
    const SLACK: f64 = 1.0 + 1e-12;
    if xi.norm() > SLACK || zeta.norm() > SLACK {
        return Err(Error::validation(
            "kernel parameters must lie in the closed unit disk",
        ));
    }
    CenteredKernel::new(family, i, j)?.eval(xi, zeta)
}

/// A moment `∫_Ω w^k w̄^j dA(w)` together with its order-doubling check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub value: Complex64,
    /// Value at order `2m`.
    pub refined: Complex64,
    pub rel_change: f64,
}

impl MomentValue {
    pub fn accuracy_warning(&self) -> bool {
        self.rel_change > DOUBLING_TOL
    }
}

/// `∫_{Ω_θ} w^k w̄^j dA(w)`, evaluated as
/// `(1/π) ∫₀¹ dt ∫_{|y|<θ(t)} (x+iy)^k (x-iy)^j dy` with `x = 1 - t` and the
/// `t`-range split at the profile's breakpoints.
pub fn cusp_moment(profile: &CuspProfile, j: usize, k: usize, m: usize) -> Result<MomentValue> {
    if j > 400 || k > 400 {
        return Err(Error::validation("moment indices are limited to 400"));
    }
    if m < 1 || m > MAX_ORDER {
        return Err(Error::validation(format!(
            "moment order must lie in 1..={MAX_ORDER}"
        )));
    }
    let value = cusp_moment_at(profile, j, k, m)?;
    let refined = cusp_moment_at(profile, j, k, 2 * m)?;
    let scale = refined.norm();
    let rel_change = if scale == 0.0 {
        (value - refined).norm()
    } else {
        (value - refined).norm() / scale
    };
    Ok(MomentValue {
        value,
        refined,
        rel_change,
    })
}

pub(crate) fn cusp_moment_at(
    profile: &CuspProfile,
    j: usize,
    k: usize,
    q: usize,
) -> Result<Complex64> {
    let rule = GaussRule::cached(q)?;
    let mut pieces = Vec::new();
    for (ta, tb) in profile.quadrature_pieces() {
        let mut row = Vec::with_capacity(q);
        for (t, wt) in rule.mapped(ta, tb) {
            let x = 1.0 - t;
            let th = profile.theta(t);
            if th == 0.0 {
                continue;
            }
            let inner: Vec<Complex64> = rule
                .mapped(-th, th)
                .map(|(y, wy)| {
                    let w = Complex64::new(x, y);
                    w.powu(k as u32) * w.conj().powu(j as u32) * wy
                })
                .collect();
            row.push(pairwise_sum_complex(&inner) * wt);
        }
        pieces.push(pairwise_sum_complex(&row));
    }
    Ok(pairwise_sum_complex(&pieces) / PI)
}

/// Real moment block `μ̂_{jk} = ∫_Ω w^k w̄^j dA`, `0 ≤ j, k < size`, row-major,
/// with `q` Gauss nodes per piece in `t` and in `y`.
///
/// The domain is symmetric about the real axis, so only `y > 0` nodes are
/// visited and the real part is doubled.
pub(crate) fn cusp_moment_block(profile: &CuspProfile, size: usize, q: usize) -> Result<Vec<f64>> {
    use rayon::prelude::*;

    let rule = GaussRule::cached(q)?;
    let pieces = profile.quadrature_pieces();
    let blocks: Vec<Vec<f64>> = pieces
        .par_iter()
        .map(|&(ta, tb)| {
            let mut acc = vec![0.0; size * size];
            let mut col = vec![0.0; size * size];
            let mut re = vec![0.0; size];
            let mut im = vec![0.0; size];
            for (t, wt) in rule.mapped(ta, tb) {
                let x = 1.0 - t;
                let th = profile.theta(t);
                if th == 0.0 {
                    continue;
                }
                col.iter_mut().for_each(|v| *v = 0.0);
                for (y, wy) in rule.mapped(-th, th) {
                    let weight = if y > 0.0 {
                        2.0 * wy
                    } else if y == 0.0 {
                        wy
                    } else {
                        continue;
                    };
                    let w = Complex64::new(x, y);
                    let mut p = Complex64::new(1.0, 0.0);
                    for n in 0..size {
                        re[n] = p.re;
                        im[n] = p.im;
                        p *= w;
                    }
                    for jj in 0..size {
                        let (rj, ij) = (weight * re[jj], weight * im[jj]);
                        let row = &mut col[jj * size..(jj + 1) * size];
                        for kk in jj..size {
                            row[kk] += rj * re[kk] + ij * im[kk];
                        }
                    }
                }
                for (a, c) in acc.iter_mut().zip(&col) {
                    *a += wt * c;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; size * size];
    for jj in 0..size {
        for kk in jj..size {
            let terms: Vec<f64> = blocks.iter().map(|b| b[jj * size + kk]).collect();
            let v = pairwise_sum(&terms) / PI;
            out[jj * size + kk] = v;
            out[kk * size + jj] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqs::DecaySequence;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_small_rules() {
        let r1 = gauss_nodes(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_nodes(2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r2.nodes()[0] + x).abs() < 1e-15);
        assert!((r2.nodes()[1] - x).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-15);
        assert!((r2.weights()[1] - 1.0).abs() < 1e-15);
        assert!(matches!(gauss_nodes(0), Err(Error::Validation(_))));
    }

    #[test]
    fn gauss_sixteen_points_x30() {
        let r = gauss_nodes(16).unwrap();
        let v = r.integrate(-1.0, 1.0, |x| x.powi(30));
        assert!((v - 2.0 / 31.0).abs() <= 1e-12 * (2.0 / 31.0));
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        for m in [1, 2, 3, 7, 32, 64, 128, 512] {
            let r = gauss_nodes(m).unwrap();
            let s: f64 = pairwise_sum(r.weights());
            assert!((s - 2.0).abs() < 1e-13, "m = {m}: {s}");
            assert!(r.weights().iter().all(|w| *w > 0.0));
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rect_basic() {
        let unit = Rect::new(0.0, 1.0, 0.0, 1.0);
        let one = integrate_rect(|_, _| c(1.0, 0.0), &unit, 4).unwrap();
        assert!((one.re - 1.0).abs() < 1e-15);
        let xy = integrate_rect(|x, y| c(x * y, 0.0), &unit, 4).unwrap();
        assert!((xy.re - 0.25).abs() < 1e-15);
        let flat = Rect::new(0.0, 1.0, 0.5, 0.5);
        assert_eq!(integrate_rect(|_, _| c(1.0, 0.0), &flat, 4).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn rect_adaptive_exponential() {
        let rect = Rect::new(0.01, 0.3, -0.2, 0.7);
        for p in [1.0, 10.0, 100.0, 1000.0] {
            let f = |x: f64, _y: f64| c((-2.0 * p * x).exp(), 0.0);
            let got = integrate_rect_adaptive(&f, &rect, 16, 1e-13).unwrap().re;
            let exact = rect.height() * ((-2.0 * p * rect.x0).exp() - (-2.0 * p * rect.x1).exp())
                / (2.0 * p);
            assert!((got - exact).abs() <= 1e-10 * exact, "p = {p}");
        }
    }

    #[test]
    fn disk_rule_basics() {
        let center = c(0.3, -0.2);
        let a = integrate_disk(|_| c(1.0, 0.0), center, 0.25, 8).unwrap();
        assert!((a.re - 0.0625).abs() < 1e-15);
        let z = integrate_disk(|z| z, c(0.0, 0.0), 1.0, 8).unwrap();
        assert!(z.norm() < 1e-15);
        let r2 = integrate_disk(|z| c(z.norm_sqr(), 0.0), c(0.0, 0.0), 1.0, 8).unwrap();
        assert!((r2.re - 0.5).abs() < 1e-15);
        // holomorphic integrand: mean value property
        let g = |z: Complex64| (c(2.0, 0.0) - z).inv();
        let mv = integrate_disk(g, center, 0.5, 16).unwrap();
        assert!((mv - g(center) * 0.25).norm() < 1e-14);
        assert!(integrate_disk(|z| z, center, 0.0, 4).is_err());
    }

    #[test]
    fn adaptive_gauss_kinked_integrand() {
        let f = |x: f64| (x - 0.3).abs();
        let v = adaptive_gauss(&f, 0.0, 1.0, 1e-15, 1e-14);
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }

    fn family() -> DiskFamily {
        let eps = DecaySequence::dyadic(12).unwrap();
        DiskFamily::new(&eps, 1.0 / 200.0, 12).unwrap()
    }

    #[test]
    fn kernel_at_centers() {
        let fam = family();
        let zero = c(0.0, 0.0);
        let k11 = kernel_centered(1, 1, zero, zero, &fam).unwrap();
        let c1: f64 = 0.99;
        let expected = 1.0 / (1.0 - c1 * c1).powi(2);
        assert!((k11.re - expected).abs() <= 1e-12 * expected);
        let kern = CenteredKernel::new(&fam, 1, 2).unwrap();
        assert!((kern.s - 0.0100495).abs() < 1e-17);
        let k12 = kernel_centered(1, 2, zero, zero, &fam).unwrap();
        assert!((k12.re - 1.0 / (0.0100495f64).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn kernel_respects_floor_on_boundary() {
        let fam = family();
        for i in 1..=12 {
            for j in i..=12 {
                let kern = CenteredKernel::new(&fam, i, j).unwrap();
                for a in 0..16 {
                    for b in 0..16 {
                        let xi = Complex64::from_polar(1.0, a as f64 * PI / 8.0);
                        let zeta = Complex64::from_polar(1.0, b as f64 * PI / 8.0);
                        let d = kern.denominator(xi, zeta).norm();
                        assert!(d >= fam.delta_pow(i));
                        assert!(kern.eval(xi, zeta).unwrap().norm().is_finite());
                    }
                }
            }
        }
        assert!(kernel_centered(2, 1, c(0.0, 0.0), c(0.0, 0.0), &fam).is_err());
        assert!(kernel_centered(1, 1, c(1.5, 0.0), c(0.0, 0.0), &fam).is_err());
    }

    #[test]
    fn kernel_floor_violation_is_integrity_error() {
        let fam = family();
        let mut kern = CenteredKernel::new(&fam, 3, 3).unwrap();
        kern.s = 0.0;
        assert!(matches!(
            kern.eval(c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::NumericIntegrity(_))
        ));
    }

    #[test]
    fn cusp_area_moment_matches_profile_integral() {
        let eps = DecaySequence::dyadic(6).unwrap();
        let prof = CuspProfile::anchored(&eps, 1.0 / 200.0).unwrap();
        let m00 = cusp_moment(&prof, 0, 0, 64).unwrap();
        let theta = |t: f64| prof.eval(t).unwrap();
        let mut oracle = 0.0;
        let mut b = 1.0;
        while b > 1e-30 {
            let a = b / 7.0;
            oracle += adaptive_gauss(&theta, a, b, 0.0, 1e-15);
            b = a;
        }
        let oracle = 2.0 * oracle / PI;
        assert!((m00.value.re - oracle).abs() <= 1e-12 * oracle);
        assert!(m00.value.im.abs() <= 1e-15 * oracle);
        assert!(!m00.accuracy_warning());
    }

    #[test]
    fn cusp_moments_real_and_symmetric() {
        let eps = DecaySequence::dyadic(4).unwrap();
        let prof = CuspProfile::anchored(&eps, 1.0 / 200.0).unwrap();
        let m01 = cusp_moment(&prof, 0, 1, 32).unwrap().value;
        assert!(m01.im.abs() <= 1e-15 * m01.re.abs());
        for (j, k) in [(0, 3), (2, 5), (1, 7)] {
            let a = cusp_moment(&prof, j, k, 32).unwrap().value;
            let b = cusp_moment(&prof, k, j, 32).unwrap().value;
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
        let block = cusp_moment_block(&prof, 8, 32).unwrap();
        for (j, k) in [(0, 0), (0, 3), (2, 5), (7, 7)] {
            let v = cusp_moment_at(&prof, j, k, 32).unwrap().re;
            assert!((block[j * 8 + k] - v).abs() <= 1e-12 * v.abs());
        }
        assert!(cusp_moment(&prof, 401, 0, 32).is_err());
    }
}

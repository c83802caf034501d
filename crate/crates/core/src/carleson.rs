//! Carleson window masses of `μ = n_φ dA` for both constructions.
//!
//! Cusp: `S(ξ, h) = 𝔻 ∩ D(ξ, h)` and `n_φ = 1_Ω`.
//! Rectilinear: `W(1, h) = {1 - h ≤ |z| < 1, |arg z| < πh}` and the
//! half-windows `W'_n = {1 - 2⁻ⁿ < |z| < 1 - 2⁻ⁿ⁻¹, |arg z| < π2⁻ⁿ}`, both
//! pulled back to `u = -log w` where `dA(w) = e^{-2 Re u} dA(u)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::geometry::{eps4, CuspProfile, RectilinearDomain};
use crate::quad::{adaptive_gauss, Rect};
use crate::{Error, Result};

/// `A(S(ξ, h) ∩ Ω_θ)` for `0 < h ≤ 2`, `|ξ| = 1`.
///
/// At `ξ = 1` the slice `{t² + y² < h², |y| < θ(t)}` is split at the
/// crossing `θ(t*)² + t*² = h²`, giving closed forms on both sides. Other
/// `ξ` are integrated slice by slice along the chord direction `t = 1 - x`.
pub fn window_area_cusp(profile: &CuspProfile, h: f64, xi: Complex64) -> Result<f64> {
    if !(h > 0.0 && h <= 2.0) {
        return Err(Error::validation(format!("h must lie in (0, 2], got {h}")));
    }
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::validation("xi must lie on the unit circle"));
    }
    if xi.im == 0.0 && xi.re > 0.0 {
        return Ok(window_at_one(profile, h));
    }
    // Local coordinates of ξ: t = 1 - cos φ = 2 sin²(φ/2), y = sin φ.
    let phi = xi.arg();
    let tc = 2.0 * (0.5 * phi).sin().powi(2);
    let yc = phi.sin();
    let lo = (tc - h).max(0.0);
    let hi = (tc + h).min(1.0);
    if lo >= hi {
        return Ok(0.0);
    }
    // Slices are parametrized by t = tc + h cos α, so the chord half-length
    // is h sin α and the integrand stays smooth at the ends of the chord.
    let alpha = |t: f64| ((t - tc) / h).clamp(-1.0, 1.0).acos();
    let (a0, a1) = (alpha(hi), alpha(lo));
    let at = |a: f64| (tc + h * a.cos()).max(0.0);
    let slice = |a: f64| {
        let half = h * a.sin();
        let th = profile.theta(at(a));
        ((yc + half).min(th) - (yc - half).max(-th)).max(0.0) * half
    };
    let mut knots = vec![a0, a1];
    if a0 < 0.5 * PI && 0.5 * PI < a1 {
        knots.push(0.5 * PI);
    }
    knots.extend(
        profile
            .breakpoints()
            .into_iter()
            .filter(|&b| b > lo && b < hi)
            .map(alpha),
    );
    knots.sort_by(f64::total_cmp);
    // Kinks of the slice length: the arcs y = yc ± h sin α crossing ±θ.
    let crossings: Vec<f64> = knots
        .windows(2)
        .flat_map(|w| arc_crossings(profile, h, tc, yc, w[0], w[1]))
        .collect();
    knots.extend(crossings);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    // The slice ends are differences of coordinates of size about
    // |yc| + tc, which sets the attainable absolute accuracy.
    let scale = h * (h + yc.abs() + tc);
    let total: f64 = knots
        .windows(2)
        .map(|w| adaptive_gauss(&slice, w[0], w[1], 1e-14 * scale, 1e-12))
        .sum();
    Ok(total / PI)
}

/// Roots in `(a, b)` of `yc ± h sin α ± θ(tc + h cos α)`, located by sign
/// changes on a sample grid and refined by bisection.
fn arc_crossings(profile: &CuspProfile, h: f64, tc: f64, yc: f64, a: f64, b: f64) -> Vec<f64> {
    const SAMPLES: usize = 64;
    let th = |s: f64| profile.theta((tc + h * s.cos()).max(0.0));
    let fs: [&dyn Fn(f64) -> f64; 4] = [
        &|s| yc + h * s.sin() - th(s),
        &|s| yc + h * s.sin() + th(s),
        &|s| yc - h * s.sin() - th(s),
        &|s| yc - h * s.sin() + th(s),
    ];
    let mut out = Vec::new();
    for f in fs {
        let mut prev_t = a;
        let mut prev = f(a);
        for i in 1..=SAMPLES {
            let t = a + (b - a) * i as f64 / SAMPLES as f64;
            let v = f(t);
            if (prev < 0.0) != (v < 0.0) {
                let (mut lo, mut hi) = (prev_t, t);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if (f(mid) < 0.0) == (prev < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev_t = t;
            prev = v;
        }
    }
    out
}

fn window_at_one(profile: &CuspProfile, h: f64) -> f64 {
    let top = h.min(1.0);
    let g = |t: f64| {
        let th = profile.theta(t);
        th * th + t * t - h * h
    };
    if g(top) <= 0.0 {
        // The whole profile over (0, top) lies inside the circle.
        return 2.0 * profile.integral(0.0, top) / PI;
    }
    let (mut a, mut b) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let ts = 0.5 * (a + b);
    let inner = profile.integral(0.0, ts);
    // ∫_{t*}^{top} √(h² - t²) dt.
    let tail = if top == h {
        let v = (h * h - ts * ts).max(0.0).sqrt();
        0.5 * (h * h * (v / h).min(1.0).asin() - ts * v)
    } else {
        let prim = |t: f64| 0.5 * (t * (h * h - t * t).sqrt() + h * h * (t / h).asin());
        prim(top) - prim(ts)
    };
    2.0 * (inner + tail) / PI
}

/// `ξ = 1`, `n` equally spaced points, and `e^{±i 2^-k}` for `k = 1..=62`.
pub fn xi_grid(n_uniform: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for k in 1..n_uniform {
        out.push(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n_uniform as f64));
    }
    for k in 1..=62 {
        let a = (-(k as f64)).exp2();
        out.push(Complex64::from_polar(1.0, a));
        out.push(Complex64::from_polar(1.0, -a));
    }
    out
}

/// Grid maximum of [`window_area_cusp`] over `xis`, which must contain `1`.
pub fn rho(profile: &CuspProfile, h: f64, xis: &[Complex64]) -> Result<f64> {
    if !xis.iter().any(|x| *x == Complex64::new(1.0, 0.0)) {
        return Err(Error::validation("the xi grid must contain 1"));
    }
    xis.iter()
        .map(|&x| window_area_cusp(profile, h, x))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowMeasureReport {
    /// Strictly decreasing.
    pub h: Vec<f64>,
    pub rho: Vec<f64>,
    /// `h⁻² ρ̂(h)`.
    pub index: Vec<f64>,
    /// `ε_j / δ` on anchor grids.
    pub bound: Vec<Option<f64>>,
    pub xi_count: usize,
}

/// `ρ̂` on `h_j = δ^j`, `j = 1..=n`, for an anchored profile.
pub fn cusp_window_report(
    profile: &CuspProfile,
    n: usize,
    xis: &[Complex64],
) -> Result<WindowMeasureReport> {
    let delta = profile
        .delta()
        .ok_or_else(|| Error::validation("anchored profile needed for the δ^j grid"))?;
    let h: Vec<f64> = (1..=n).map(|j| delta.powi(j as i32)).collect();
    window_report_on(profile, &h, xis)
}

/// `ρ̂` on an arbitrary strictly decreasing grid.
pub fn window_report_on(
    profile: &CuspProfile,
    h: &[f64],
    xis: &[Complex64],
) -> Result<WindowMeasureReport> {
    if h.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::validation("h grid must be strictly decreasing"));
    }
    let mut rho_v = Vec::with_capacity(h.len());
    let mut index = Vec::with_capacity(h.len());
    let mut bound = Vec::with_capacity(h.len());
    for &hj in h {
        let r = rho(profile, hj, xis)?;
        rho_v.push(r);
        index.push(r / (hj * hj));
        bound.push(profile.ratio_bound(hj));
    }
    Ok(WindowMeasureReport {
        h: h.to_vec(),
        rho: rho_v,
        index,
        bound,
        xi_count: xis.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessSummary {
    pub max_index: f64,
    pub index: Vec<f64>,
    /// `index[j] ≤ bound[j]` where a bound exists.
    pub within_bound: Vec<bool>,
    pub strictly_decreasing: bool,
}

pub fn boundedness_index(r: &WindowMeasureReport) -> BoundednessSummary {
    BoundednessSummary {
        max_index: r.index.iter().cloned().fold(0.0, f64::max),
        index: r.index.clone(),
        within_bound: r
            .index
            .iter()
            .zip(&r.bound)
            .map(|(i, b)| b.map_or(true, |b| *i <= b))
            .collect(),
        strictly_decreasing: r.index.windows(2).all(|w| w[1] < w[0]),
    }
}

/// `∫_R e^{-2x} dx dy / π` in closed form.
pub(crate) fn exp_mass(r: &Rect) -> f64 {
    exp_moment(r, 1.0)
}

/// `∫_R e^{-2qx} dx dy / π = Δy e^{-2q x₀} (1 - e^{-2qΔx}) / (2πq)`.
pub(crate) fn exp_moment(r: &Rect, q: f64) -> f64 {
    if r.width() <= 0.0 || r.height() <= 0.0 {
        return 0.0;
    }
    r.height() * (-2.0 * q * r.x0).exp() * -(-2.0 * q * r.width()).exp_m1() / (2.0 * PI * q)
}

/// Preimage strips `{x₀ < x < x₁, |y - 2kπ| < πh}` meeting `F`, intersected
/// in each rectangle's sheet frame.
fn strip_mass(f: &RectilinearDomain, x0: f64, x1: f64, h: f64) -> f64 {
    let mut total = 0.0;
    for tr in f.rects() {
        let r = &tr.rect;
        if r.x1 <= x0 || r.x0 >= x1 {
            continue;
        }
        // Strip centres 2πj in the sheet frame, j = k - sheet.
        let j_lo = ((r.y0 / PI - h) / 2.0).ceil() as i64;
        let j_hi = ((r.y1 / PI + h) / 2.0).floor() as i64;
        for j in j_lo..=j_hi {
            let c = 2.0 * PI * j as f64;
            let strip = Rect::new(x0, x1, c - PI * h, c + PI * h);
            if let Some(cut) = r.intersect(&strip) {
                total += exp_mass(&cut);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EksyWindow {
    pub n: u32,
    /// `h_N = 2^{-2N}`.
    pub h: f64,
    /// `μ(W'_{2N})`.
    pub mu_half: f64,
    /// `A(W'_{2N})`, normalized area of the half-window itself.
    pub half_area: f64,
    /// `μ(W(1, h_N))`.
    pub mu_window: f64,
    /// `h_N⁻² μ(W(1, h_N))`.
    pub index: f64,
    pub l: u64,
}

/// Exact `μ(W'_{2N})` and `μ(W(1, h_N))`, `h_N = 2^{-2N}`.
pub fn eksy_window_measure(f: &RectilinearDomain, big_n: u32) -> Result<EksyWindow> {
    if big_n < 1 || big_n > f.n_max() {
        return Err(Error::validation(format!(
            "N must lie in 1..={}, got {big_n}",
            f.n_max()
        )));
    }
    let h = (-2.0 * f64::from(big_n)).exp2();
    let mu_half = strip_mass(f, eps4(2 * big_n + 1), eps4(2 * big_n), h);
    let mu_window = strip_mass(f, 0.0, eps4(2 * big_n), h);
    // Annular sector of opening 2πh between radii 1 - h and 1 - h/2.
    let half_area = h * (0.5 * h) * (2.0 - 1.5 * h);
    Ok(EksyWindow {
        n: big_n,
        h,
        mu_half,
        half_area,
        mu_window,
        index: mu_window / (h * h),
        l: f.height(big_n),
    })
}

/// [`eksy_window_measure`] for `N = 1..=n_max`.
pub fn eksy_windows(f: &RectilinearDomain) -> Result<Vec<EksyWindow>> {
    (1..=f.n_max()).map(|n| eksy_window_measure(f, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::pairwise_sum;
    use crate::seqs::{DecaySequence, GrowthSequence};

    fn canonical() -> CuspProfile {
        CuspProfile::anchored(&DecaySequence::dyadic(8).unwrap(), 1.0 / 200.0).unwrap()
    }

    /// Midpoint-rule area of `{t² + y² < h², |y| < θ(t)}`.
    /// Midpoint-rule area of `{t² + y² < h², |y| < θ(t)}`, with a second,
    /// finer mesh on `[h(1 - 10⁻⁴), h]` where the circle cuts the profile.
    fn brute_window(p: &CuspProfile, h: f64, n: usize) -> f64 {
        let split = h * (1.0 - 1e-4);
        let mid = |a: f64, b: f64| {
            let dt = (b - a) / n as f64;
            let v: Vec<f64> = (0..n)
                .map(|i| {
                    let t = a + (i as f64 + 0.5) * dt;
                    2.0 * p.theta(t).min((h * h - t * t).max(0.0).sqrt()) * dt
                })
                .collect();
            pairwise_sum(&v)
        };
        (mid(0.0, split) + mid(split, h)) / PI
    }

    #[test]
    fn window_at_one_against_midpoint() {
        let p = canonical();
        for h in [0.3, 0.005, 1e-4, 2.5e-5] {
            let a = window_area_cusp(&p, h, Complex64::new(1.0, 0.0)).unwrap();
            let b = brute_window(&p, h, 200_000);
            assert!((a - b).abs() < 1e-6 * a, "h={h}: {a} vs {b}");
            assert!(a <= h * p.theta(h));
        }
    }

    #[test]
    fn lens_index_is_quarter() {
        // θ(t) = t: the window is a circular sector of opening π/2.
        let p = CuspProfile::lens();
        for h in [0.5, 1e-3, 1e-9] {
            let a = window_area_cusp(&p, h, Complex64::new(1.0, 0.0)).unwrap();
            assert!((a / (h * h) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn large_window_covers_domain() {
        let p = canonical();
        let a = window_area_cusp(&p, 2.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((a - p.area()).abs() < 1e-15);
    }

    #[test]
    fn off_axis_windows() {
        let p = canonical();
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(window_area_cusp(&p, 0.9, Complex64::new(-1.0, 0.0)).unwrap(), 0.0);
        // ξ → 1 recovers the ξ = 1 value.
        let h = 1e-3;
        let near = Complex64::from_polar(1.0, 1e-12);
        let a = window_area_cusp(&p, h, near).unwrap();
        let b = window_area_cusp(&p, h, one).unwrap();
        assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
        // A window whose centre is farther than h from Ω is empty.
        let far = Complex64::from_polar(1.0, 0.1);
        assert_eq!(window_area_cusp(&p, 0.05, far).unwrap(), 0.0);
    }

    #[test]
    fn rho_grid_behaviour() {
        let p = canonical();
        let grid = xi_grid(16);
        assert!(rho(&p, 0.1, &grid[1..]).is_err());
        let at_one = window_area_cusp(&p, 1e-3, grid[0]).unwrap();
        assert_eq!(rho(&p, 1e-3, &grid[..1]).unwrap(), at_one);
        let hs = [0.1, 0.03, 0.01, 0.003, 0.001];
        let r: Vec<f64> = hs.iter().map(|&h| rho(&p, h, &grid).unwrap()).collect();
        for w in r.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for (h, r) in hs.iter().zip(&r) {
            assert!(*r <= h * p.theta(*h));
        }
    }

    #[test]
    fn boundedness_on_canonical_grid() {
        let p = canonical();
        let rep = cusp_window_report(&p, 8, &xi_grid(8)).unwrap();
        let s = boundedness_index(&rep);
        assert!(s.strictly_decreasing);
        assert!(s.within_bound.iter().all(|&b| b));
    }

    #[test]
    fn zero_profile_gives_zero() {
        let p = CuspProfile::power(0.0, 2.0).unwrap();
        let rep = window_report_on(&p, &[0.5, 0.1, 0.01], &xi_grid(4)).unwrap();
        assert!(rep.rho.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn eksy_half_window_closed_form() {
        let f = RectilinearDomain::build(&GrowthSequence::Const(1), 3).unwrap();
        let w = eksy_window_measure(&f, 1).unwrap();
        assert!((w.mu_half - 13.0 / 256.0).abs() < 1e-15);
        let g = RectilinearDomain::build(&GrowthSequence::Log2, 10).unwrap();
        for n in 1..=10 {
            let w = eksy_window_measure(&g, n).unwrap();
            let h = w.h;
            let box_part = w.l as f64 * h * h * (1.0 - 0.75 * h);
            assert!((w.mu_half - box_part).abs() <= 1e-14 * box_part, "N={n}: {} vs {box_part}", w.mu_half);
            assert!(w.index >= w.l as f64 * (1.0 - h));
        }
        assert!(eksy_window_measure(&g, 11).is_err());
        assert!(eksy_window_measure(&g, 0).is_err());
    }
}

//! End-to-end checks on the canonical instances. Each test prints a single
//! `PASS`/`FAIL` line before asserting.

use std::f64::consts::PI;
use std::sync::OnceLock;

use dlab_core::carleson::{
    boundedness_index, cusp_window_report, eksy_window_measure, window_area_cusp, window_report_on,
    xi_grid,
};
use dlab_core::galerkin::{floor_rows, moment_matrix, MomentRegion};
use dlab_core::geometry::{eps4, CuspProfile, DiskFamily, RectilinearDomain};
use dlab_core::gram::{bernstein_certificate, build_gram, DoublingCheck, GramMatrix};
use dlab_core::powers::{
    eksy_growth_report, f_kernel, f_sum, jensen_lower, power_norm_series, power_norm_sq_region,
    CoefficientSeries, UnitDisk,
};
use dlab_core::quad::{gauss_nodes, integrate_rect_adaptive, Rect};
use dlab_core::seqs::{DecaySequence, GrowthSequence};
use dlab_core::spectra::{neumann_lower, schur_bound, DenseMatrix};
use dlab_core::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const DELTA: f64 = 1.0 / 200.0;
const N: usize = 8;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "[{id:02}] {} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn family() -> DiskFamily {
    DiskFamily::new(&DecaySequence::dyadic(N).unwrap(), DELTA, N).unwrap()
}

/// Order-32 Gram matrix and its comparison against order 64, built once.
fn canonical() -> &'static (GramMatrix, DoublingCheck) {
    static CELL: OnceLock<(GramMatrix, DoublingCheck)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = build_gram(&family(), 32).unwrap();
        let d = g.doubling_check().unwrap();
        (g, d)
    })
}

fn eps(i: usize) -> f64 {
    (-7.0 - i as f64).exp2()
}

/// Attempted Cholesky factorization; succeeds iff `a` is positive definite
/// (up to rounding in the pivots).
fn cholesky_ok(a: &DenseMatrix) -> bool {
    let n = a.rows();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    true
}

fn shifted(a: &DenseMatrix, tau: f64) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        a[(i, j)] - if i == j { tau } else { 0.0 }
    })
}

/// Power iteration for `‖A‖₂` on `AᵀA`.
fn spectral_norm(a: &DenseMatrix) -> f64 {
    let n = a.cols();
    let mut v = vec![1.0; n];
    let mut est = 0.0;
    for _ in 0..2000 {
        let av: Vec<f64> = (0..a.rows())
            .map(|i| (0..n).map(|j| a[(i, j)] * v[j]).sum())
            .collect();
        let w: Vec<f64> = (0..n)
            .map(|j| (0..a.rows()).map(|i| a[(i, j)] * av[i]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        est = norm.sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    est
}

#[test]
fn c01_gram_inequalities() {
    let (g, dbl) = canonical();
    let fam = g.family();
    let mut worst: f64 = f64::INFINITY;
    let mut oracle_err: f64 = 0.0;
    for i in 1..=N {
        let m = g.entry(i, i);
        worst = worst.min((m - eps(i) * eps(i) / 32.0) / (eps(i) * eps(i) / 32.0));
        let r = fam.radius(i);
        let dpi = DELTA.powi(i as i32);
        // ε'_i = r_i / (1 - c_i²) with 1 - c_i² = 4δ^i (1 - δ^i).
        let ep = r / (4.0 * dpi * (1.0 - dpi));
        let bound = 32.0 * (r / (2.0 * dpi)).powi(3);
        worst = worst.min((bound - (m - ep * ep).abs()) / bound);
        for j in i + 1..=N {
            let b = eps(i) * eps(j) * DELTA.powi((j - i) as i32);
            worst = worst.min((b - g.entry(i, j).abs()) / b);
        }
        for j in i..=N {
            // Mean-value property of the Bergman kernel: the double
            // average over two disks is the value at their centres.
            let dj = DELTA.powi(j as i32);
            let s = 2.0 * dpi + 2.0 * dj - 4.0 * dpi * dj;
            let exact = r * fam.radius(j) / (s * s);
            oracle_err = oracle_err.max((g.entry(i, j) - exact).abs() / exact);
        }
    }
    let pass = worst > 0.0 && dbl.max_residual < 1e-8 && oracle_err < 1e-10;
    report(
        1,
        "gram inequalities",
        pass,
        format!(
            "min relative margin {worst:.3e}, doubling {}->{} residual {:.2e}, closed-form error {oracle_err:.2e}",
            dbl.order, dbl.refined_order, dbl.max_residual
        ),
    );
    assert!(pass);
}

#[test]
fn c02_schur_certificate() {
    let (g, _) = canonical();
    let m = g.matrix();
    let nu = DenseMatrix::from_fn(N, N, |i, j| if i == j { 0.0 } else { m[(i, j)] / m[(i, i)] });
    let alpha = (0..N)
        .map(|i| (0..N).map(|j| nu[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let beta = (0..N)
        .map(|j| (0..N).map(|i| nu[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let schur = schur_bound(&nu);
    let norm = spectral_norm(&nu);
    let pass = (schur - (alpha * beta).sqrt()).abs() <= 1e-15 * schur
        && schur <= 0.5
        && norm <= schur;
    report(
        2,
        "schur certificate",
        pass,
        format!("schur bound {schur:.4e} <= 0.5, spectral norm {norm:.4e}"),
    );
    assert!(pass);
}

#[test]
fn c03_approximation_floor() {
    let (g, _) = canonical();
    let (summary, certs) = bernstein_certificate(g).unwrap();
    let m = g.matrix();
    let floor_sq = eps(N) * eps(N) / 64.0;
    let floor = eps(N) / 8.0;
    // M - τI positive definite certifies λ_min(M) > τ without the eigensolver.
    let chol_floor = cholesky_ok(&shifted(m, floor_sq));
    let lam = summary.lambda_min;
    let min_diag = (0..N).map(|i| m[(i, i)]).fold(f64::INFINITY, f64::min);
    let certified = summary.certified.unwrap_or(f64::NAN);
    let chol_cert = cholesky_ok(&shifted(m, certified * (1.0 - 1e-12)));
    let neumann = neumann_lower(&g.diag(), 0.5).unwrap();
    let half_diag = neumann[N - 1] >= m[(N - 1, N - 1)] / 2.0 * (1.0 - 1e-15);
    let pass = lam >= floor_sq
        && lam.sqrt() >= floor
        && chol_floor
        && certified <= lam
        && (certified - (1.0 - summary.schur) * min_diag).abs() <= 1e-15 * certified
        && chol_cert
        && half_diag
        && certs.all_pass();
    report(
        3,
        "approximation floor",
        pass,
        format!(
            "lambda_min {lam:.4e} >= {floor_sq:.4e}, sqrt {:.4e} >= {floor:.4e}, certified {certified:.4e}, m_nn/2 {:.4e}",
            lam.sqrt(),
            m[(N - 1, N - 1)] / 2.0
        ),
    );
    assert!(pass);
}

#[test]
fn c04_compactness_index() {
    let profile = family().profile().clone();
    let xis = xi_grid(32);
    let rep = cusp_window_report(&profile, N, &xis).unwrap();
    let summary = boundedness_index(&rep);
    let mut ok = true;
    for (j, (&idx, &h)) in rep.index.iter().zip(&rep.h).enumerate() {
        ok &= idx <= eps(j + 1) / DELTA;
        // Graded midpoint oracle at ξ = 1.
        let brute = {
            let split = h * (1.0 - 1e-4);
            let mid = |a: f64, b: f64| {
                let n = 200_000;
                let dt = (b - a) / n as f64;
                (0..n)
                    .map(|i| {
                        let t = a + (i as f64 + 0.5) * dt;
                        2.0 * profile.theta(t).min((h * h - t * t).max(0.0).sqrt()) * dt
                    })
                    .sum::<f64>()
            };
            (mid(0.0, split) + mid(split, h)) / PI
        };
        let at_one = window_area_cusp(&profile, h, Complex64::new(1.0, 0.0)).unwrap();
        ok &= (at_one - brute).abs() <= 1e-6 * brute;
    }
    let decreasing = rep.index.windows(2).all(|w| w[1] < w[0]);
    let lens = window_report_on(&CuspProfile::lens(), &rep.h, &xis).unwrap();
    let lens_min = lens.index.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = ok && decreasing && summary.strictly_decreasing && lens_min >= 0.2;
    report(
        4,
        "compactness index",
        pass,
        format!(
            "index {:.3e} .. {:.3e} strictly decreasing, lens index >= {lens_min:.4}",
            rep.index[0],
            rep.index[N - 1]
        ),
    );
    assert!(pass);
}

#[test]
fn c05_half_window_exactness() {
    let single = RectilinearDomain::build(&GrowthSequence::Const(1), 4).unwrap();
    let w1 = eksy_window_measure(&single, 1).unwrap();
    // Preimage of W'_2 is exactly B_{0,2} = [ε₃, ε₂] × [-π/4, π/4].
    let rect = Rect::new(eps4(3), eps4(2), -PI / 4.0, PI / 4.0);
    let quad = integrate_rect_adaptive(
        &|x: f64, _y: f64| Complex64::new((-2.0 * x).exp() / PI, 0.0),
        &rect,
        16,
        1e-14,
    )
    .unwrap()
    .re;
    let exact = 13.0 / 256.0;
    let mut ok = (w1.mu_half - exact).abs() <= 1e-10 * exact && (quad - exact).abs() <= 1e-10 * exact;
    let f = RectilinearDomain::build(&GrowthSequence::Log2, 24).unwrap();
    let mut worst_box: f64 = 0.0;
    let mut worst_lower = f64::INFINITY;
    for n in 1..=24u32 {
        let w = eksy_window_measure(&f, n).unwrap();
        let h = (-2.0 * n as f64).exp2();
        let l = f.height(n) as f64;
        let box_part = l * h * h * (1.0 - 0.75 * h);
        worst_box = worst_box.max((w.mu_half - box_part).abs() / box_part);
        // Area of the annular sector {1 - h < r < 1 - h/2, |θ| < πh}.
        // (1 - h/2)² - (1 - h)² factored to avoid cancellation.
        let area = h * (h / 2.0) * (2.0 - 1.5 * h);
        worst_lower = worst_lower.min(w.mu_half / (l * area) - 1.0);
    }
    // μ(W') = l_N A(W') analytically; allow rounding in the comparison.
    ok &= worst_box <= 1e-10 && worst_lower >= -1e-12;
    report(
        5,
        "half-window exactness",
        ok,
        format!(
            "mu(W'_2) = {:.15} (13/256 = {exact:.15}, quadrature {quad:.15}), box part error {worst_box:.2e}, min mu/(l A) - 1 = {worst_lower:.2e}",
            w1.mu_half
        ),
    );
    assert!(ok);
}

#[test]
fn c06_unboundedness_witness() {
    let f = RectilinearDomain::build(&GrowthSequence::Log2, 24).unwrap();
    let idx: Vec<(u64, f64)> = (1..=24u32)
        .map(|n| {
            let w = eksy_window_measure(&f, n).unwrap();
            (f.height(n), w.index)
        })
        .collect();
    let exceeds = idx.iter().position(|&(_, v)| v > 10.0);
    let grows_from = idx.windows(2).position(|w| w[1].0 > w[0].0).unwrap_or(0);
    let monotone = idx[grows_from..].windows(2).all(|w| w[1].1 >= w[0].1);
    let lower = idx
        .iter()
        .enumerate()
        .all(|(i, &(l, v))| v >= l as f64 * (1.0 - (-2.0 * (i + 1) as f64).exp2()));
    let first_drop = idx.windows(2).position(|w| w[1].1 < w[0].1).map(|i| i + 2);
    let pass = exceeds.is_some() && monotone && lower;
    report(
        6,
        "unboundedness witness",
        pass,
        format!(
            "index exceeds 10 at N = {:?}, index(23) = {:.4}, index(24) = {:.4}, l_N grows from N = {}, first decrease at N = {first_drop:?}",
            exceeds.map(|i| i + 1),
            idx[22].1,
            idx[23].1,
            grows_from + 1
        ),
    );
    assert!(pass);
}

#[test]
fn c07_bounded_power_growth() {
    let growth = GrowthSequence::Log2;
    let f = RectilinearDomain::build(&growth, 24).unwrap();
    let r20 = eksy_growth_report(&f, &growth, 1 << 20).unwrap();
    let r21 = eksy_growth_report(&f, &growth, 1 << 21).unwrap();
    let stable = (r21.c_const - r20.c_const).abs() <= 0.05 * r20.c_const;
    let bounded = r20.rows.iter().all(|r| r.norm / growth.value(r.p as u64) as f64 <= r20.c_const * (1.0 + 1e-12));
    let flat = RectilinearDomain::build(&GrowthSequence::Const(1), 24).unwrap();
    let rf = eksy_growth_report(&flat, &GrowthSequence::Const(1), 1 << 20).unwrap();
    let flat_max = rf.rows.iter().map(|r| r.norm).fold(0.0, f64::max);
    let flat_last = rf.rows.last().unwrap().norm;
    // Closed form against tensor quadrature of p² e^{-2px}/π over F.
    let mut quad_err: f64 = 0.0;
    for p in [1u32, 10, 100, 1000] {
        let pf = p as f64;
        let exact = power_norm_sq_region(&f, p).unwrap();
        let q: f64 = f
            .rects()
            .iter()
            .map(|r| {
                integrate_rect_adaptive(
                    &|x: f64, _y: f64| Complex64::new(pf * pf * (-2.0 * pf * x).exp() / PI, 0.0),
                    &r.rect,
                    24,
                    1e-13,
                )
                .unwrap()
                .re
            })
            .sum();
        quad_err = quad_err.max((exact - q).abs() / exact);
    }
    let pass = stable && bounded && flat_max < 2.0 && flat_last <= flat_max && quad_err <= 1e-10;
    report(
        7,
        "bounded power growth",
        pass,
        format!(
            "C(2^20) = {:.4}, C(2^21) = {:.4}, K = {:.3}, l = 1 sup norm {flat_max:.4}, quadrature error {quad_err:.2e}",
            r20.c_const, r21.c_const, r20.k_const
        ),
    );
    assert!(pass);
}

#[test]
fn c08_calibrations() {
    let mut ok = true;
    let mut worst_route: f64 = 0.0;
    for p in 1..=64u32 {
        let series = power_norm_series(&CoefficientSeries::monomial(1), p as usize).unwrap();
        let region = power_norm_sq_region(&UnitDisk, p).unwrap().sqrt();
        let want = (p as f64).sqrt();
        worst_route = worst_route.max((series - want).abs() / want).max((region - want).abs() / want);
    }
    ok &= worst_route <= 1e-13;

    let id = moment_matrix(&MomentRegion::UnitDisk, 64, 0).unwrap();
    let mut id_err: f64 = 0.0;
    for j in 0..64 {
        for k in 0..64 {
            let want = if j == k { 1.0 } else { 0.0 };
            id_err = id_err.max((id.matrix()[(j, k)] - want).abs());
        }
    }
    ok &= id_err <= 1e-10;

    let mut rng = StdRng::seed_from_u64(20240611);
    let mut gauss_err: f64 = 0.0;
    for m in 1..=64usize {
        let rule = gauss_nodes(m).unwrap();
        for _ in 0..4 {
            let d = rng.gen_range(0..2 * m) as i32;
            let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            let got: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(x, w)| w * x.powi(d))
                .sum();
            gauss_err = gauss_err.max((got - exact).abs() / exact.max(1.0));
        }
    }
    ok &= gauss_err <= 1e-12;

    let f = RectilinearDomain::build(&GrowthSequence::Log2, 24).unwrap();
    let cusp = family().profile().clone();
    let mut jensen_ok = true;
    for p in (1..=64u32).chain([100, 200, 400]) {
        let (lo, act) = jensen_lower(&f, p).unwrap();
        jensen_ok &= lo <= act * (1.0 + 1e-8);
        let (lo, act) = jensen_lower(&cusp, p).unwrap();
        jensen_ok &= lo <= act * (1.0 + 1e-8);
    }
    ok &= jensen_ok;
    report(
        8,
        "calibrations",
        ok,
        format!(
            "power routes {worst_route:.1e}, disk identity {id_err:.1e}, Gauss monomials {gauss_err:.1e}, Jensen {}",
            if jensen_ok { "holds" } else { "violated" }
        ),
    );
    assert!(ok);
}

#[test]
fn c09_galerkin_monotonicity() {
    let profile = family().profile().clone();
    let big = moment_matrix(&MomentRegion::Cusp(profile), 128, 128).unwrap();
    let mid = big.truncate(64).unwrap();
    let small = big.truncate(32).unwrap();
    let tol = 1e-13 * big.matrix().frobenius();
    let mut monotone = true;
    for n in 0..N {
        monotone &= mid.eigenvalues()[n] >= small.eigenvalues()[n] - tol;
        monotone &= big.eigenvalues()[n] >= mid.eigenvalues()[n] - tol;
    }
    let sum: f64 = big.eigenvalues().iter().sum();
    let trace_err = (sum - big.moment_trace()).abs() / big.moment_trace();
    let eps_list: Vec<f64> = (1..=N).map(eps).collect();
    let crossed: Vec<usize> = floor_rows(&big, &eps_list)
        .iter()
        .filter(|r| r.crossed)
        .map(|r| r.n)
        .collect();
    let pass = monotone && trace_err <= 1e-10;
    report(
        9,
        "galerkin monotonicity",
        pass,
        format!(
            "lambda_8: K=32 {:.3e}, K=64 {:.3e}, K=128 {:.3e}; trace error {trace_err:.1e}; floor crossed for n in {crossed:?}",
            small.eigenvalues()[N - 1],
            mid.eigenvalues()[N - 1],
            big.eigenvalues()[N - 1]
        ),
    );
    assert!(pass);
}

#[test]
fn c10_f_function() {
    let grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 1001.0).collect();
    let increasing = grid.windows(2).all(|w| f_kernel(w[1]) > f_kernel(w[0]));
    let wide: Vec<f64> = (0..=4000).map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 4000.0)).collect();
    let dominated = wide
        .iter()
        .all(|&x| f_kernel(x) <= (x * x).min(1.35 / x));
    let mut ps: Vec<f64> = (1..=1000).map(|p| p as f64).collect();
    ps.extend((0..=300).map(|i| 10f64.powf(3.0 + 3.0 * i as f64 / 300.0)));
    let sup = |terms: u32| ps.iter().map(|&p| f_sum(p, terms)).fold(0.0, f64::max);
    let (s20, s40) = (sup(20), sup(40));
    let stable = (s40 - s20).abs() <= 1e-9 * s40;
    let pass = increasing && dominated && s40.is_finite() && stable;
    report(
        10,
        "F-function facts",
        pass,
        format!("sup_p sum F(p/4^n) = {s40:.6} (20 terms {s20:.6}), F <= min(x^2, 1.35/x) on 4001 points"),
    );
    assert!(pass);
}

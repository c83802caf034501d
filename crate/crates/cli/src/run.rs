use dlab_core::carleson::{cusp_window_report, eksy_windows, window_report_on, xi_grid};
use dlab_core::galerkin::{floor_rows, moment_matrix, MomentMatrix, MomentRegion};
use dlab_core::geometry::{CuspProfile, DiskFamily, RectilinearDomain};
use dlab_core::gram::{bernstein_certificate, build_gram, tec_report};
use dlab_core::powers::eksy_growth_report;
use dlab_core::report::{Certificate, CertificateReport, Relation};
use dlab_core::seqs::{clamp_monotone, slow_decay};

use crate::config::{Experiment, ProfileKind, Resolved};
use crate::output::{num, svg_chart, OutDir, Series};
use crate::CliError;

/// Runs one experiment, writes its artifacts and `certificates.txt`, and
/// returns the certificates.
pub fn run(exp: Experiment, cfg: &Resolved) -> Result<CertificateReport, CliError> {
    let mut out = OutDir::create(&cfg.out)?;
    let report = match exp {
        Experiment::CuspGram => cusp_gram(cfg, &mut out)?,
        Experiment::CuspRho => cusp_rho(cfg, &mut out)?,
        Experiment::CuspGalerkin => cusp_galerkin(cfg, &mut out)?,
        Experiment::EksyGrowth => eksy_growth(cfg, &mut out)?,
        Experiment::EksyWindows => eksy_windows_exp(cfg, &mut out)?,
        Experiment::SeqDemo => seq_demo(cfg, &mut out)?,
    };
    let mut text = report.render();
    let failed = report.failures().count();
    text.push_str(&format!(
        "{} certificates, {} failed\n",
        report.entries.len(),
        failed
    ));
    out.text("certificates.txt", &text)?;
    for path in out.written() {
        println!("wrote {}", path.display());
    }
    Ok(report)
}

fn family(cfg: &Resolved) -> Result<DiskFamily, CliError> {
    Ok(DiskFamily::new(&cfg.eps, cfg.delta, cfg.eps.len())?)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn cusp_gram(cfg: &Resolved, out: &mut OutDir) -> Result<CertificateReport, CliError> {
    let fam = family(cfg)?;
    let g = build_gram(&fam, cfg.order)?;
    let n = g.len();
    let tec = tec_report(&g);
    let (summary, bern) = bernstein_certificate(&g)?;
    let dbl = g.doubling_check()?;

    let mut rep = tec.certificates.clone();
    rep.extend(bern);
    rep.push(Certificate::new(
        format!("doubling[{}->{}]", dbl.order, dbl.refined_order),
        dbl.max_residual,
        Relation::AtMost,
        1e-8,
        "order doubling",
    ));

    let mut rows = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            rows.push(vec![i.to_string(), j.to_string(), num(g.entry(i, j))]);
        }
    }
    out.csv("gram.csv", &["i", "j", "m_ij"], &rows)?;

    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows.push(vec![
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                    num(tec.nu[i * n + j]),
                    num(tec.nu_bounds[i * n + j]),
                ]);
            }
        }
    }
    out.csv("nu.csv", &["i", "j", "nu_ij", "bound"], &rows)?;
    out.text("region.json", &json(&fam))?;
    out.text("summary.json", &json(&summary))?;

    if cfg.plot {
        let diag: Vec<(f64, f64)> = (1..=n).map(|i| (i as f64, g.entry(i, i))).collect();
        let lower: Vec<(f64, f64)> = (1..=n)
            .map(|i| (i as f64, fam.eps().get(i).powi(2) / 32.0))
            .collect();
        out.text(
            "gram.svg",
            &svg_chart(
                "Gram diagonal",
                "i",
                "m_ii",
                false,
                true,
                &[
                    Series { label: "m_ii", points: diag },
                    Series { label: "eps_i^2/32", points: lower },
                ],
            ),
        )?;
    }
    Ok(rep)
}

fn cusp_rho(cfg: &Resolved, out: &mut OutDir) -> Result<CertificateReport, CliError> {
    let anchored = CuspProfile::anchored(&cfg.eps, cfg.delta)?;
    let xis = xi_grid(cfg.xi_grid);
    let n = cfg.eps.len();
    let r = match cfg.profile {
        ProfileKind::Anchored => cusp_window_report(&anchored, n, &xis)?,
        ProfileKind::Lens => {
            let h: Vec<f64> = (1..=n).map(|j| cfg.delta.powi(j as i32)).collect();
            window_report_on(&CuspProfile::lens(), &h, &xis)?
        }
    };
    let mut rep = CertificateReport::default();
    for (j, (idx, b)) in r.index.iter().zip(&r.bound).enumerate() {
        if let Some(b) = b {
            rep.push(Certificate::new(
                format!("index_bound[{}]", j + 1),
                *idx,
                Relation::AtMost,
                *b,
                "window quadrature",
            ));
        }
    }
    if cfg.profile == ProfileKind::Anchored {
        for j in 1..r.index.len() {
            // Strict decrease: the ratio must stay below the largest float under 1.
            rep.push(Certificate::new(
                format!("index_decreasing[{}]", j + 1),
                r.index[j] / r.index[j - 1],
                Relation::AtMost,
                1.0 - f64::EPSILON / 2.0,
                "window quadrature",
            ));
        }
    }
    let rows: Vec<Vec<String>> = (0..r.h.len())
        .map(|j| {
            vec![
                num(r.h[j]),
                num(r.rho[j]),
                num(r.index[j]),
                r.bound[j].map(num).unwrap_or_default(),
            ]
        })
        .collect();
    out.csv("rho.csv", &["h", "rho", "index", "bound"], &rows)?;
    if cfg.plot {
        let mut series = vec![Series {
            label: "index",
            points: r.h.iter().zip(&r.index).map(|(&h, &i)| (h, i)).collect(),
        }];
        let bound: Vec<(f64, f64)> = r
            .h
            .iter()
            .zip(&r.bound)
            .filter_map(|(&h, b)| b.map(|b| (h, b)))
            .collect();
        if !bound.is_empty() {
            series.push(Series { label: "bound", points: bound });
        }
        out.text("rho.svg", &svg_chart("Window index", "h", "index", true, true, &series))?;
    }
    Ok(rep)
}

/// `K/4`, `K/2`, `K`, dropping duplicates and zeros.
fn k_levels(k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [k / 4, k / 2, k].into_iter().filter(|&x| x >= 1).collect();
    v.dedup();
    v
}

fn cusp_galerkin(cfg: &Resolved, out: &mut OutDir) -> Result<CertificateReport, CliError> {
    let profile = CuspProfile::anchored(&cfg.eps, cfg.delta)?;
    let big = moment_matrix(&MomentRegion::Cusp(profile), cfg.k, cfg.order)?;
    let levels = k_levels(cfg.k);
    let mats: Vec<MomentMatrix> = levels
        .iter()
        .map(|&k| big.truncate(k))
        .collect::<Result<_, _>>()?;
    let tol = 1e-13 * big.matrix().frobenius();
    let mut rep = CertificateReport::default();
    for w in mats.windows(2) {
        for n in 0..w[0].size().min(cfg.eps.len()) {
            rep.push(Certificate::new(
                format!("interlacing[n={},K={}->{}]", n + 1, w[0].size(), w[1].size()),
                w[1].eigenvalues()[n],
                Relation::AtLeast,
                w[0].eigenvalues()[n] - tol,
                "Jacobi eigenvalues",
            ));
        }
    }
    let sum: f64 = big.eigenvalues().iter().sum();
    rep.push(Certificate::new(
        "trace_identity",
        (sum - big.moment_trace()).abs() / big.moment_trace(),
        Relation::AtMost,
        1e-10,
        "moment trace",
    ));
    let eps = cfg.eps.as_slice();
    let mut rows = Vec::new();
    for m in &mats {
        for r in floor_rows(m, eps) {
            rows.push(vec![r.n.to_string(), r.k.to_string(), num(r.lambda), num(r.floor)]);
        }
    }
    out.csv("galerkin.csv", &["n", "K", "lambda", "floor"], &rows)?;
    if cfg.plot {
        let mut series: Vec<Series> = mats
            .iter()
            .map(|m| Series {
                label: "lambda_n",
                points: floor_rows(m, eps).iter().map(|r| (r.n as f64, r.lambda)).collect(),
            })
            .collect();
        series.push(Series {
            label: "eps_n^2/64",
            points: floor_rows(&big, eps).iter().map(|r| (r.n as f64, r.floor)).collect(),
        });
        out.text("galerkin.svg", &svg_chart("Galerkin eigenvalues", "n", "lambda", false, true, &series))?;
    }
    Ok(rep)
}

fn domain(cfg: &Resolved) -> Result<RectilinearDomain, CliError> {
    Ok(RectilinearDomain::build(&cfg.growth, cfg.n_max)?)
}

fn eksy_growth(cfg: &Resolved, out: &mut OutDir) -> Result<CertificateReport, CliError> {
    let f = domain(cfg)?;
    let r = eksy_growth_report(&f, &cfg.growth, cfg.p_max)?;
    let mut rep = CertificateReport::default();
    if cfg.p_max >= 2 {
        let half = eksy_growth_report(&f, &cfg.growth, cfg.p_max / 2)?;
        rep.push(Certificate::new(
            format!("c_stability[{}->{}]", cfg.p_max / 2, cfg.p_max),
            (r.c_const - half.c_const).abs() / half.c_const,
            Relation::AtMost,
            0.05,
            "closed-form moments",
        ));
    }
    for row in &r.rows {
        rep.push(Certificate::new(
            format!("ratio[p={}]", row.p),
            row.ratio,
            Relation::AtMost,
            r.c_const,
            "closed-form moments",
        ));
    }
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.p.to_string(),
                num(row.norm),
                num(row.majorant),
                row.m_p.to_string(),
                num(row.ratio),
            ]
        })
        .collect();
    out.csv("growth.csv", &["p", "norm", "majorant", "Mp", "ratio"], &rows)?;
    out.text("region.json", &(f.to_json() + "\n"))?;
    if cfg.plot {
        let pts = |g: fn(&dlab_core::powers::GrowthRow) -> f64| -> Vec<(f64, f64)> {
            r.rows.iter().map(|row| (row.p as f64, g(row))).collect()
        };
        out.text(
            "growth.svg",
            &svg_chart(
                "Power norms",
                "p",
                "value",
                true,
                false,
                &[
                    Series { label: "norm / M_p", points: pts(|row| row.ratio) },
                    Series { label: "norm", points: pts(|row| row.norm) },
                ],
            ),
        )?;
    }
    Ok(rep)
}

fn eksy_windows_exp(cfg: &Resolved, out: &mut OutDir) -> Result<CertificateReport, CliError> {
    let f = domain(cfg)?;
    let ws = eksy_windows(&f)?;
    let mut rep = CertificateReport::default();
    for w in &ws {
        // μ(W') and l_N A(W') agree analytically; the slack covers rounding.
        rep.push(Certificate::new(
            format!("half_window_lower[N={}]", w.n),
            w.mu_half,
            Relation::AtLeast,
            w.l as f64 * w.half_area * (1.0 - 1e-12),
            "closed-form rectangle masses",
        ));
    }
    let start = ws.windows(2).position(|p| p[1].l > p[0].l).unwrap_or(ws.len());
    for p in ws.windows(2).skip(start) {
        rep.push(Certificate::new(
            format!("index_non_decreasing[N={}]", p[1].n),
            p[1].index,
            Relation::AtLeast,
            p[0].index,
            "closed-form rectangle masses",
        ));
    }
    let rows: Vec<Vec<String>> = ws
        .iter()
        .map(|w| vec![w.n.to_string(), num(w.mu_half), num(w.index)])
        .collect();
    out.csv("windows.csv", &["N", "mu_half", "index"], &rows)?;
    out.text("region.json", &(f.to_json() + "\n"))?;
    if cfg.plot {
        out.text(
            "windows.svg",
            &svg_chart(
                "Window index",
                "N",
                "index",
                false,
                false,
                &[
                    Series {
                        label: "h^-2 mu(W)",
                        points: ws.iter().map(|w| (w.n as f64, w.index)).collect(),
                    },
                    Series {
                        label: "l_N",
                        points: ws.iter().map(|w| (w.n as f64, w.l as f64)).collect(),
                    },
                ],
            ),
        )?;
    }
    Ok(rep)
}

fn seq_demo(cfg: &Resolved, out: &mut OutDir) -> Result<CertificateReport, CliError> {
    let clamped = clamp_monotone(&cfg.raw)?;
    let slow = slow_decay(&clamped, cfg.rho)?;
    let again = slow_decay(slow.as_slice(), cfg.rho)?;
    let s = slow.as_slice();
    let mut rep = CertificateReport::default();
    for i in 0..s.len() {
        rep.push(Certificate::new(
            format!("dominates[{}]", i + 1),
            s[i],
            Relation::AtLeast,
            clamped[i],
            "recursion",
        ));
        if i + 1 < s.len() {
            rep.push(Certificate::new(
                format!("slow[{}]", i + 2),
                s[i + 1],
                Relation::AtLeast,
                cfg.rho * s[i],
                "recursion",
            ));
        }
    }
    let drift = s
        .iter()
        .zip(again.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    rep.push(Certificate::new("idempotent", drift, Relation::AtMost, 0.0, "recursion"));
    let rows: Vec<Vec<String>> = (0..s.len())
        .map(|i| {
            vec![
                (i + 1).to_string(),
                num(cfg.raw[i]),
                num(clamped[i]),
                num(s[i]),
            ]
        })
        .collect();
    out.csv("seq.csv", &["i", "raw", "clamped", "slow"], &rows)?;
    if cfg.plot {
        let pts = |v: &[f64]| -> Vec<(f64, f64)> {
            v.iter().enumerate().map(|(i, &x)| ((i + 1) as f64, x)).collect()
        };
        out.text(
            "seq.svg",
            &svg_chart(
                "Sequence regularization",
                "i",
                "value",
                false,
                true,
                &[
                    Series { label: "raw", points: pts(&cfg.raw) },
                    Series { label: "clamped", points: pts(&clamped) },
                    Series { label: "slow", points: pts(s) },
                ],
            ),
        )?;
    }
    Ok(rep)
}

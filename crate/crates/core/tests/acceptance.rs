//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qsmooth_core::experiments::{
    entropy_row, hybrid_report, qubit_joint_density, qubit_smoothed, second_measurement, unit_grid, weak_values,
    HybridConfig, QubitGaussianConfig,
};
use qsmooth_core::info::{InequalityReport, INEQUALITY_TOL};
use qsmooth_core::measurement::{gaussian_unnormalized_post, seeded_rng};
use qsmooth_core::quad::QuadratureSpec;
use qsmooth_core::sampling::{check_case, Case, CaseOutcome, Family};
use qsmooth_core::{BlochVector, CMatrix};
use rand::Rng;

type Verdict = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Verdict,
}

fn suite(family: Family, n: u64) -> Result<Vec<(Case, CaseOutcome)>, String> {
    (0..n)
        .map(|i| {
            let case = Case::generate(family, 0, i).map_err(|e| format!("{family} case {i}: {e}"))?;
            let out = check_case(&case).map_err(|e| format!("{family} case {i}: {e}"))?;
            Ok((case, out))
        })
        .collect()
}

/// Smallest margin over reports whose name passes `keep`, failing below `-INEQUALITY_TOL`.
fn min_margin(outcomes: &[(Case, CaseOutcome)], keep: impl Fn(&str) -> bool) -> Result<(f64, usize), String> {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (case, out) in outcomes {
        for r in out.inequalities.iter().filter(|r| keep(&r.name)) {
            count += 1;
            worst = worst.min(r.margin);
            if r.margin < -INEQUALITY_TOL {
                return Err(violation(case, r));
            }
        }
    }
    if count == 0 {
        return Err("no matching reports".into());
    }
    Ok((worst, count))
}

fn violation(case: &Case, r: &InequalityReport) -> String {
    format!(
        "{} violated (margin {:e}) in {} case {} (seed {})",
        r.name, r.margin, case.family, case.index, case.seed
    )
}

fn c1_average_identity() -> Verdict {
    let out = suite(Family::Single, 1000)?;
    let mut worst: f64 = 0.0;
    for (case, o) in &out {
        let d = o.identity("average_smoothing").ok_or("missing identity")?.lhs;
        if d > 1e-10 {
            return Err(format!("defect {d:e} in case {} (seed {})", case.index, case.seed));
        }
        worst = worst.max(d);
    }
    Ok(format!("1000 cases, max defect {worst:.2e}"))
}

fn c2_central() -> Verdict {
    let single = suite(Family::Single, 1000)?;
    let (ms, ns) = min_margin(&single, |n| n == "central_upper" || n == "central_lower")?;
    let bip = suite(Family::Bipartite, 500)?;
    let (mb, nb) = min_margin(&bip, |n| n.starts_with("central_") && n.contains('['))?;
    Ok(format!(
        "{ns} full-system margins (min {ms:.2e}), {nb} subsystem margins (min {mb:.2e})"
    ))
}

fn c3_gap_bounds() -> Verdict {
    let gap = |n: &str| n.starts_with("hy_upper_bound") || n.starts_with("hm_lower_bound");
    let (ms, ns) = min_margin(&suite(Family::Single, 1000)?, gap)?;
    let (mb, nb) = min_margin(&suite(Family::Bipartite, 500)?, gap)?;
    Ok(format!(
        "{ns} single margins (min {ms:.2e}), {nb} bipartite margins (min {mb:.2e})"
    ))
}

fn c4_equality() -> Verdict {
    let mut worst_lower: f64 = 0.0;
    for (case, o) in suite(Family::SameBasis, 100)? {
        let m = o.inequality("central_lower").ok_or("missing central_lower")?.margin;
        if m.abs() > 1e-10 {
            return Err(format!("same-basis case {} lower margin {m:e}", case.index));
        }
        worst_lower = worst_lower.max(m.abs());
    }
    let mut worst_upper: f64 = 0.0;
    for (case, o) in suite(Family::Unbiased, 100)? {
        let m = o.inequality("central_upper").ok_or("missing central_upper")?.margin;
        if m.abs() > 1e-10 {
            return Err(format!("unbiased case {} upper margin {m:e}", case.index));
        }
        worst_upper = worst_upper.max(m.abs());
    }
    Ok(format!(
        "same basis max |lower margin| {worst_lower:.2e}, unbiased max |upper margin| {worst_upper:.2e}"
    ))
}

fn c5_mutual() -> Verdict {
    let (m, n) = min_margin(&suite(Family::Bipartite, 500)?, |n| n.starts_with("mutual_"))?;
    Ok(format!("{n} margins, min {m:.2e}"))
}

fn identities_hold(
    outcomes: &[(Case, CaseOutcome)],
    keep: impl Fn(&str) -> bool,
    tol: f64,
) -> Result<(f64, usize), String> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (case, o) in outcomes {
        for r in o.identities.iter().filter(|r| keep(&r.name)) {
            count += 1;
            worst = worst.max(r.defect);
            if r.defect > tol {
                return Err(format!(
                    "{} defect {:e} in case {} (seed {})",
                    r.name, r.defect, case.index, case.seed
                ));
            }
        }
    }
    if count == 0 {
        return Err("no matching identities".into());
    }
    Ok((worst, count))
}

fn c6_tripartite() -> Verdict {
    let out = suite(Family::Tripartite, 200)?;
    let (d, nd) = identities_hold(&out, |n| n.starts_with("tripartite_"), 1e-9)?;
    let (m, nm) = min_margin(&out, |n| n.starts_with("ssa_"))?;
    Ok(format!(
        "{nd} decompositions (max defect {d:.2e}), {nm} SSA margins (min {m:.2e})"
    ))
}

fn c7_projective() -> Verdict {
    let out = suite(Family::ProjectiveBipartite, 500)?;
    let (d, nd) = identities_hold(&out, |n| n.starts_with("sb_"), 1e-9)?;
    let (mp, np) = min_margin(&out, |n| n.starts_with("positive"))?;
    let (mh, nh) = min_margin(&out, |n| n == "holevo" || n == "retro_holevo")?;
    Ok(format!(
        "{nd} decompositions (max defect {d:.2e}), {np} positivity/upper margins (min {mp:.2e}), {nh} Holevo margins (min {mh:.2e})"
    ))
}

fn fig2_initial() -> BlochVector {
    BlochVector::new(0.9, FRAC_PI_4, 0.0).unwrap()
}

fn timed_row(cfg: &QubitGaussianConfig) -> Result<qsmooth_core::experiments::EntropyRow, String> {
    let t = Instant::now();
    let row = entropy_row(cfg, &QuadratureSpec::default()).map_err(|e| format!("{cfg:?}: {e}"))?;
    if t.elapsed() > Duration::from_secs(1) {
        return Err(format!("point a={} took {:?}", cfg.a, t.elapsed()));
    }
    Ok(row)
}

fn c8_qubit_limits() -> Verdict {
    let b = fig2_initial();
    let mut worst_weak: f64 = 0.0;
    for (theta, phi) in [(FRAC_PI_4, PI), (0.0, PI), (FRAC_PI_2, PI), (PI / 6.0, 0.0)] {
        let row = timed_row(&QubitGaussianConfig::new(b, 100.0, theta, phi).unwrap())?;
        for v in [row.s_nonselective, row.s_retro_avg, row.s_selective_avg] {
            let d = (v - row.s_initial).abs();
            if d > 1e-3 {
                return Err(format!(
                    "a=100 theta={theta}: entropy {v} vs S[rho_I] {}",
                    row.s_initial
                ));
            }
            worst_weak = worst_weak.max(d);
        }
    }
    let same = timed_row(&QubitGaussianConfig::new(b, 0.02, 0.0, PI).unwrap())?;
    let d_same = (same.s_retro_avg - same.s_selective_avg).abs();
    if d_same > 1e-3 {
        return Err(format!(
            "a=0.02 theta=0: retro {} vs selective {}",
            same.s_retro_avg, same.s_selective_avg
        ));
    }
    let indep = timed_row(&QubitGaussianConfig::new(b, 0.02, FRAC_PI_2, PI).unwrap())?;
    let d_indep = (indep.s_retro_avg - indep.s_nonselective).abs();
    if d_indep > 1e-3 {
        return Err(format!(
            "a=0.02 theta=pi/2: retro {} vs nonselective {}",
            indep.s_retro_avg, indep.s_nonselective
        ));
    }
    Ok(format!(
        "weak limit max dev {worst_weak:.2e}; strong limit |retro-sel| {d_same:.2e}, |retro-nonsel| {d_indep:.2e}"
    ))
}

fn fig3a(a: f64) -> QubitGaussianConfig {
    QubitGaussianConfig::new(fig2_initial(), a, FRAC_PI_4, PI).unwrap()
}

fn max_abs_weak(a: f64) -> Result<f64, String> {
    let w = weak_values(&fig3a(a), &QuadratureSpec::default()).map_err(|e| e.to_string())?;
    Ok(w.v_plus.abs().max(w.v_minus.abs()))
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn c9_weak_values() -> Verdict {
    let spec = QuadratureSpec::default();
    let mut rng = seeded_rng(9);
    let (mut worst_mean, mut worst_dec): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let b = BlochVector::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let cfg = QubitGaussianConfig::new(
            b,
            rng.random_range(0.02..20.0),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let w = weak_values(&cfg, &spec).map_err(|e| format!("{cfg:?}: {e}"))?;
        let d_mean = (w.v_omega - b.r() * b.theta().cos()).abs();
        let d_dec = (w.p_plus * w.v_plus + w.p_minus * w.v_minus - w.v_omega).abs();
        if d_mean > 1e-8 || d_dec > 1e-8 {
            return Err(format!(
                "{cfg:?}: mean defect {d_mean:e}, decomposition defect {d_dec:e}"
            ));
        }
        worst_mean = worst_mean.max(d_mean);
        worst_dec = worst_dec.max(d_dec);
    }
    for a in log_points(0.02, 0.4, 40) {
        let m = max_abs_weak(a)?;
        if m > 1.0 {
            return Err(format!("|<V_+-)>| = {m} > 1 at a = {a} <= 0.4"));
        }
    }
    let beyond = log_points(0.41, 20.0, 40);
    let mut hi = None;
    for &a in &beyond {
        if max_abs_weak(a)? > 1.0 {
            hi = Some(a);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Err("no a in (0.4, 20] gives |<V_+->| > 1".into());
    };
    let mut lo = 0.4;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if max_abs_weak(mid)? > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(format!(
        "mean defect {worst_mean:.2e}, decomposition defect {worst_dec:.2e}; |<V_+->| first exceeds 1 at a = {hi:.4}"
    ))
}

fn h2(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

fn c10_hybrid() -> Verdict {
    for q in unit_grid(101).unwrap() {
        let out = hybrid_report(&HybridConfig::fig4(q).unwrap()).map_err(|e| format!("q={q}: {e}"))?;
        let r = out.row;
        let upper = r.s_a_nonsel - r.s_a_retro;
        let lower = r.s_a_retro - r.s_a_sel;
        if upper < -INEQUALITY_TOL || lower < -INEQUALITY_TOL {
            return Err(format!("q={q}: subsystem-a sandwich margins {upper:e}, {lower:e}"));
        }
        if r.i_sel.abs() > 1e-9 {
            return Err(format!("q={q}: selective mutual information {}", r.i_sel));
        }
        if r.i_nonsel - r.i_retro < -INEQUALITY_TOL {
            return Err(format!("q={q}: I_nonsel {} < I_retro {}", r.i_nonsel, r.i_retro));
        }
    }
    // At q = 1/2: rho_Omega^a = diag(3/4, 1/4); rho_+^a has spectrum (1/6, 5/6)
    // with p(+) = 3/4 and rho_-^a = I/2; the selective states are I/2 and pure.
    let expected = [h2(0.25), 0.75 * h2(1.0 / 6.0) + 0.25 * LN_2, 0.5 * LN_2];
    let r = hybrid_report(&HybridConfig::fig4(0.5).unwrap())
        .map_err(|e| e.to_string())?
        .row;
    let got = [r.s_a_nonsel, r.s_a_retro, r.s_a_sel];
    for (g, e) in got.iter().zip(&expected) {
        if (g - e).abs() > 1e-6 {
            return Err(format!("q=0.5 entropies {got:?}, expected {expected:?}"));
        }
    }
    Ok(format!(
        "101 q points; q=0.5 (S_nonsel, S_retro, S_sel) = ({:.6}, {:.6}, {:.6}); the listed S_retro 0.512855 differs from the eigenvalue arithmetic 0.75 H(1/6) + 0.25 ln 2 = {:.6}",
        got[0], got[1], got[2], expected[1]
    ))
}

/// `Tr[Omega_V rho Omega_V^dagger M_pm]` from explicit 2x2 matrix products.
fn matrix_oracle(cfg: &QubitGaussianConfig, v: f64) -> (f64, f64, CMatrix) {
    let a = cfg.a;
    let pref = (2.0 * PI * a * a).powf(-0.25);
    let mut omega = CMatrix::zeros(2, 2);
    omega[(0, 0)] = Complex64::new(pref * (-(v - 1.0) * (v - 1.0) / (4.0 * a * a)).exp(), 0.0);
    omega[(1, 1)] = Complex64::new(pref * (-(v + 1.0) * (v + 1.0) / (4.0 * a * a)).exp(), 0.0);
    let rho = cfg.initial_state();
    let post = &(&omega * rho.matrix()) * &omega.dagger();
    let e = second_measurement(cfg.theta, cfg.phi).effects();
    ((&post * &e[0]).trace().re, (&post * &e[1]).trace().re, post)
}

fn c11_oracles() -> Verdict {
    let mut rng = seeded_rng(11);
    let mut worst_point: f64 = 0.0;
    for _ in 0..100 {
        let b = BlochVector::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let cfg = QubitGaussianConfig::new(
            b,
            rng.random_range(0.05..3.0),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let v = rng.random_range(-3.0..3.0);
        let (pp, pm) = qubit_joint_density(&cfg, v);
        let (op, om, post) = matrix_oracle(&cfg, v);
        let direct = gaussian_unnormalized_post(&cfg.initial_state(), &cfg.gaussian(), v).map_err(|e| e.to_string())?;
        let d = (pp - op).abs().max((pm - om).abs()).max(direct.max_abs_diff(&post));
        if d > 1e-12 {
            return Err(format!("{cfg:?} v={v}: closed form differs by {d:e}"));
        }
        worst_point = worst_point.max(d);
    }

    let spec = QuadratureSpec::default();
    let fig3b_initial = BlochVector::new(0.9, FRAC_PI_2, 0.0).unwrap();
    let mut worst_quad: f64 = 0.0;
    for a in [0.1, 0.4, 1.0, 5.0] {
        let cfgs = [
            QubitGaussianConfig::new(fig2_initial(), a, FRAC_PI_4, PI).unwrap(),
            QubitGaussianConfig::new(fig3b_initial, a, PI / 6.0, 0.0).unwrap(),
        ];
        for cfg in cfgs {
            let s = qubit_smoothed(&cfg, &spec).map_err(|e| e.to_string())?;
            let oracle = trapezoid_smoothed(&cfg, 100_000);
            let states = [
                s.rho_plus.ok_or("rho_+ unreachable")?,
                s.rho_minus.ok_or("rho_- unreachable")?,
            ];
            for (rho, o) in states.iter().zip(&oracle) {
                let d = rho.matrix().max_abs_diff(o);
                if d > 1e-6 {
                    return Err(format!("{cfg:?}: quadrature differs from grid oracle by {d:e}"));
                }
                worst_quad = worst_quad.max(d);
            }
        }
    }
    Ok(format!(
        "closed forms max defect {worst_point:.2e}; quadrature vs 1e5-point grid max defect {worst_quad:.2e}"
    ))
}

/// `rho_pm` from the trapezoid rule over `n` uniform points on the quadrature window.
fn trapezoid_smoothed(cfg: &QubitGaussianConfig, n: usize) -> [CMatrix; 2] {
    let (lo, hi) = cfg.domain(&QuadratureSpec::default());
    let h = (hi - lo) / (n - 1) as f64;
    let mut num = [CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)];
    let mut den = [0.0; 2];
    for i in 0..n {
        let v = lo + h * i as f64;
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        let (pp, pm, post) = matrix_oracle(cfg, v);
        let tr = post.trace().re;
        if tr <= 0.0 {
            continue;
        }
        let state = post.scale(1.0 / tr);
        for (k, p) in [pp, pm].into_iter().enumerate() {
            num[k] += &state.scale(w * p);
            den[k] += w * p;
        }
    }
    [num[0].scale(1.0 / den[0]), num[1].scale(1.0 / den[1])]
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "average smoothing identity",
            limit: Some(Duration::from_secs(10)),
            run: c1_average_identity,
        },
        Criterion {
            id: 2,
            title: "entropy sandwich",
            limit: Some(Duration::from_secs(30)),
            run: c2_central,
        },
        Criterion {
            id: 3,
            title: "gap bounds",
            limit: None,
            run: c3_gap_bounds,
        },
        Criterion {
            id: 4,
            title: "equality conditions",
            limit: None,
            run: c4_equality,
        },
        Criterion {
            id: 5,
            title: "mutual-information bounds",
            limit: None,
            run: c5_mutual,
        },
        Criterion {
            id: 6,
            title: "tripartite decompositions",
            limit: None,
            run: c6_tripartite,
        },
        Criterion {
            id: 7,
            title: "projective bipartite identities and bounds",
            limit: None,
            run: c7_projective,
        },
        Criterion {
            id: 8,
            title: "qubit model limits",
            limit: None,
            run: c8_qubit_limits,
        },
        Criterion {
            id: 9,
            title: "weak values",
            limit: None,
            run: c9_weak_values,
        },
        Criterion {
            id: 10,
            title: "hybrid model",
            limit: Some(Duration::from_secs(5)),
            run: c10_hybrid,
        },
        Criterion {
            id: 11,
            title: "oracle equivalence",
            limit: None,
            run: c11_oracles,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let t = Instant::now();
        let mut verdict = (c.run)();
        let elapsed = t.elapsed();
        if let (Ok(_), Some(limit)) = (&verdict, c.limit) {
            if elapsed > limit {
                verdict = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match verdict {
            Ok(detail) => println!("PASS criterion {:>2} {} [{elapsed:.2?}]: {detail}", c.id, c.title),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {} [{elapsed:.2?}]: {detail}", c.id, c.title);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

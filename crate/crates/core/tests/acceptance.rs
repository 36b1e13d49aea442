//! Acceptance criteria. Each test writes one `criterion N ... PASS|FAIL` line to stderr
//! (bypassing the harness capture) and then asserts it.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walker_core::breadth::closed_form::closed_form_forcing;
use walker_core::breadth::suite::{theorem_suite, SuiteConfig, Theorem, Verdict};
use walker_core::breadth::{closed_form_m1, initial_data, integrate_coefficients, Family, Forcing};
use walker_core::darboux::{measure_darboux_scalars, rotate_frenet_samples, CaseTag, CurveKind, DarbouxProfile};
use walker_core::frenet::{frame_residuals, integrate_curve_from_frenet_data, lorentz_mix, pseudo_orthonormal_frame};
use walker_core::metric::{cross_with, inner_with};
use walker_core::{io, pipeline, Point, RunConfig, WalkerMetric};

const FIELDS: [&str; 5] = ["0", "y*z", "0.5*sin(y) + 0.2*z^2", "0.3*y^2 - 0.2*z", "exp(0.2*y)*cos(z)"];

fn announce(criterion: u8, name: &str, pass: bool, detail: &str, elapsed: Duration) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("\ncriterion {criterion} {name:<32} {verdict}  {detail}  ({:.2} s)\n", elapsed.as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
    pass
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn random_vector(r: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(r.random_range(-scale..scale), r.random_range(-scale..scale), r.random_range(-scale..scale))
}

fn random_point(r: &mut ChaCha8Rng) -> Point {
    Point::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0))
}

#[test]
fn criterion_1_cross_product_identity() {
    let start = Instant::now();
    let mut r = rng(1);
    let metrics: Vec<WalkerMetric> = FIELDS.iter().map(|f| WalkerMetric::parse(f).unwrap()).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let g = &metrics[r.random_range(0..metrics.len())];
        let p = random_point(&mut r);
        let f = g.f_at(&p).unwrap();
        let [u, v, w] = [0, 1, 2].map(|_| random_vector(&mut r, 3.0));
        let det = Matrix3::from_columns(&[u, v, w]).determinant();
        let lhs = inner_with(f, &cross_with(f, &u, &v), &w);
        let scale = (1.0 + f.abs()) * u.norm() * v.norm() * w.norm();
        worst = worst.max((lhs - det).abs() / scale);
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && elapsed < Duration::from_secs(1);
    assert!(announce(1, "cross-product identity", pass, &format!("max scaled residual {worst:.2e}"), elapsed));
}

/// `Γ^i_jk = ½ g^il (∂_j g_lk + ∂_k g_lj - ∂_l g_jk)` with central differences of the metric
/// matrix and a numerical inverse.
fn christoffel_oracle(g: &WalkerMetric, p: &Point) -> [[[f64; 3]; 3]; 3] {
    let h = 1e-5;
    let dg: Vec<Matrix3<f64>> = (0..3)
        .map(|k| {
            let mut plus = p.coords();
            let mut minus = p.coords();
            plus[k] += h;
            minus[k] -= h;
            (g.matrix(&Point::from_coords(&plus)).unwrap() - g.matrix(&Point::from_coords(&minus)).unwrap()) / (2.0 * h)
        })
        .collect();
    let inv = g.matrix(p).unwrap().try_inverse().expect("metric is nondegenerate");
    let mut out = [[[0.0; 3]; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                row[j][k] = (0..3).map(|l| 0.5 * inv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)])).sum();
            }
        }
    }
    out
}

#[test]
fn criterion_2_christoffel_oracle() {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for field in FIELDS {
        let g = WalkerMetric::parse(field).unwrap();
        for _ in 0..100 {
            let p = random_point(&mut r);
            let table = g.christoffel(&p).unwrap();
            let oracle = christoffel_oracle(&g, &p);
            for (i, row) in oracle.iter().enumerate() {
                for (j, col) in row.iter().enumerate() {
                    for (k, want) in col.iter().enumerate() {
                        worst = worst.max((table.get(i, j, k) - want).abs());
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed < Duration::from_secs(1);
    assert!(announce(2, "christoffel oracle", pass, &format!("max deviation {worst:.2e}"), elapsed));
}

#[test]
fn criterion_3_frenet_residuals() {
    let start = Instant::now();
    let g = WalkerMetric::parse("0.5*sin(y) + 0.2*z^2").unwrap();
    let p0 = Point::new(0.1, -0.3, 0.2);
    let mut worst: f64 = 0.0;
    for case in CaseTag::ALL {
        let signs = case.frenet_signs();
        let frame = lorentz_mix(pseudo_orthonormal_frame(&g, &p0, signs).unwrap(), signs, 0.4, 0.25);
        let sol = integrate_curve_from_frenet_data(
            &g,
            |s| Ok(1.0 + 0.3 * (2.0 * s).sin()),
            |s| Ok(0.6 - 0.5 * s),
            signs,
            p0,
            frame,
            1.0,
            1e-4,
        )
        .unwrap();
        let r = frame_residuals(&g, &sol.samples, sol.step).unwrap();
        worst = worst.max(r.into_iter().fold(0.0, f64::max));
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed < Duration::from_secs(10);
    assert!(announce(3, "frenet residuals", pass, &format!("max residual {worst:.2e}"), elapsed));
}

/// Max `|τg - want(θ', τ)|` and max `|κg² ± κn² - κ²| / κ²` on a manufactured curve.
fn darboux_identities(case: CaseTag) -> (f64, f64) {
    let g = WalkerMetric::parse("y*z").unwrap();
    let p0 = Point::new(0.0, 0.2, -0.1);
    let kappa = |s: f64| 1.0 + 0.3 * (2.0 * s).sin();
    let tau = |s: f64| 0.5 - 0.4 * s;
    let theta = |s: f64| 0.3 + 0.8 * s + 0.2 * (3.0 * s).sin();
    let dtheta = |s: f64| 0.8 + 0.6 * (3.0 * s).cos();
    let signs = case.frenet_signs();
    let frame = lorentz_mix(pseudo_orthonormal_frame(&g, &p0, signs).unwrap(), signs, 0.2, 0.1);
    let sol =
        integrate_curve_from_frenet_data(&g, |s| Ok(kappa(s)), |s| Ok(tau(s)), signs, p0, frame, 1.0, 1e-3).unwrap();
    let angles: Vec<f64> = sol.samples.iter().map(|s| theta(s.s)).collect();
    let mut darboux = rotate_frenet_samples(case, &sol.samples, &angles).unwrap();
    let scalars = measure_darboux_scalars(&g, case, &mut darboux, sol.step).unwrap();
    let mut torsion: f64 = 0.0;
    let mut curvature: f64 = 0.0;
    for (sample, [kg, kn, tg]) in sol.samples.iter().zip(scalars) {
        let s = sample.s;
        let (want_tg, split) = match case {
            CaseTag::TimelikeCase1 => (dtheta(s) - tau(s), kg * kg + kn * kn),
            _ => (dtheta(s) + tau(s), kn * kn - kg * kg),
        };
        torsion = torsion.max((tg - want_tg).abs());
        curvature = curvature.max((split - kappa(s).powi(2)).abs() / kappa(s).powi(2));
    }
    (torsion, curvature)
}

#[test]
fn criterion_4_darboux_scalar_identities() {
    let start = Instant::now();
    let (tg1, k1) = darboux_identities(CaseTag::TimelikeCase1);
    let (tg2, _) = darboux_identities(CaseTag::SpacelikeCase2i);
    let elapsed = start.elapsed();
    let pass = tg1 <= 1e-5 && k1 <= 1e-6 && tg2 <= 1e-5 && elapsed < Duration::from_secs(10);
    let detail = format!("timelike τg {tg1:.2e}, κ split {k1:.2e}; spacelike τg {tg2:.2e}");
    assert!(announce(4, "darboux scalar identities", pass, &detail, elapsed));
}

#[test]
fn criterion_5_breadth_conservation() {
    let start = Instant::now();
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for case in CaseTag::ALL {
        for _ in 0..50 {
            let kappa = format!(
                "{:.6} + {:.6}*sin({:.6}*s)",
                r.random_range(0.5..1.5),
                r.random_range(0.0..0.4),
                r.random_range(0.5..4.0)
            );
            let tau = format!("{:.6} + {:.6}*s", r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let theta = format!(
                "{:.6}*cos({:.6}*s) + {:.6}",
                r.random_range(-0.6..0.6),
                r.random_range(0.5..3.0),
                r.random_range(-0.4..0.4)
            );
            let profile =
                DarbouxProfile::parse(case, CurveKind::General, &kappa, &tau, Some(&theta), 0.0, 1.0).unwrap();
            let m0 = [0, 1, 2].map(|_| r.random_range(-1.0..1.0));
            let coeffs = integrate_coefficients(&profile, &Forcing::conserving(case), m0, 1e-3).unwrap();
            worst = worst.max(coeffs.breadth_variation());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-8 && elapsed < Duration::from_secs(5);
    assert!(announce(5, "breadth conservation", pass, &format!("max variation {worst:.2e}"), elapsed));
}

#[test]
fn criterion_6_closed_form_matches_integration() {
    let start = Instant::now();
    use CaseTag::*;
    use CurveKind::*;
    // (case, kind, helix ratio); the timelike families cover every branch of their ODE
    let runs = [
        (TimelikeCase1, Geodesic, 0.5),
        (TimelikeCase1, Geodesic, 1.0),
        (TimelikeCase1, Geodesic, 2.0),
        (TimelikeCase1, Asymptotic, 0.5),
        (TimelikeCase1, Asymptotic, 1.0),
        (TimelikeCase1, Asymptotic, 2.0),
        (TimelikeCase1, PrincipalLine, 0.5),
        (TimelikeCase1, PrincipalLine, 1.0),
        (TimelikeCase1, PrincipalLine, 2.0),
        (SpacelikeCase2i, Geodesic, 0.7),
        (SpacelikeCase2i, PrincipalLine, 0.7),
        (SpacelikeCase2ii, Asymptotic, 0.7),
    ];
    let a = [0.3, -0.2, 0.1];
    let mut worst: f64 = 0.0;
    let mut worst_run = String::new();
    for (case, kind, c) in runs {
        let family = Family::of(case, kind).unwrap();
        // unit rate in the reduction variable so that the window is [0, 2]
        let (kappa, tau) = if family.is_principal() { (c, 1.0) } else { (1.0, c) };
        let profile = DarbouxProfile::parse(case, kind, &kappa.to_string(), &tau.to_string(), None, 0.0, 2.0).unwrap();
        let m0 = initial_data(case, kind, c, a, 0.0).unwrap();
        let coeffs = integrate_coefficients(&profile, &closed_form_forcing(case), m0, 1e-3).unwrap();
        let v_end = family.variable(&profile, 2.0).unwrap().abs();
        assert!((v_end - 2.0).abs() < 1e-9, "window ends at {v_end}");
        for (i, &s) in coeffs.s.iter().enumerate() {
            let v = family.variable(&profile, s).unwrap();
            let err = (coeffs.m1[i] - closed_form_m1(case, kind, c, a, v).unwrap()).abs();
            if err > worst {
                worst = err;
                worst_run = format!("{case} {kind} c = {c}");
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed < Duration::from_secs(5);
    let detail = format!("{} families, max |Δm1| {worst:.2e} ({worst_run})", runs.len());
    assert!(announce(6, "closed form vs integration", pass, &detail, elapsed));
}

#[test]
fn criterion_7_theorem_suite() {
    let start = Instant::now();
    let theorems = vec![
        Theorem::TimelikeGeodesicConstantM1,
        Theorem::TimelikeGeodesicVanishingM1,
        Theorem::TimelikeAsymptoticVanishingM1,
        Theorem::TimelikePrincipalVanishingM1,
        Theorem::Spacelike2iGeodesicConstantM1,
        Theorem::Spacelike2iGeodesicVanishingM1,
        Theorem::Spacelike2iiAsymptoticConstantM1,
        Theorem::Spacelike2iiPrincipalVanishingM1,
    ];
    let cfg = SuiteConfig { samples: 100, theorems, ..SuiteConfig::default() };
    let outcomes = theorem_suite(&cfg).unwrap();
    let elapsed = start.elapsed();
    let mut lines = String::new();
    for o in &outcomes {
        lines.push_str(&format!(
            "    {:<40} {:<12} pass {:>3} fail {:>3} unsatisfiable {:>3}\n",
            o.id,
            format!("{:?}", o.verdict).to_lowercase(),
            o.passed,
            o.failed,
            o.unsatisfiable
        ));
        if let Some(first) = &o.first_failure {
            lines.push_str(&format!("        counterexample {first}\n"));
        }
    }
    let _ = std::io::stderr().write_all(lines.as_bytes());
    let bad: Vec<&str> = outcomes.iter().filter(|o| o.verdict != Verdict::Pass).map(|o| o.id.as_str()).collect();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(60);
    let detail = format!("{} of {} theorems pass at 100 samples", outcomes.len() - bad.len(), outcomes.len());
    assert!(announce(7, "theorem suite", pass, &detail, elapsed), "theorems with counterexamples: {bad:?}");
}

fn pair_config(f: &str, tau: &str, b1: f64, b2: f64) -> RunConfig {
    let text = format!(
        r#"{{
            "f": "{f}",
            "numerics": {{ "step": 0.001, "length": 1.0 }},
            "profile": {{ "case": "timelike", "kind": "geodesic", "kappa": "1 + 0.3*sin(2*s)", "tau": "{tau}" }},
            "start": {{ "point": [0.1, 0.2, 0.3], "phi": 0.3, "eta": 0.2 }},
            "pair": {{ "subcase": "m1_zero", "constants": {{ "b1": {b1}, "b2": {b2}, "c": 0.5 }} }}
        }}"#
    );
    RunConfig::from_json(&text).unwrap()
}

#[test]
fn criterion_8_end_to_end_pair() {
    let start = Instant::now();
    let mut breadth: f64 = 0.0;
    let mut tangent: f64 = 0.0;
    for f in ["0", "y*z"] {
        let run = pipeline::run_pair(&pair_config(f, "0.7 - s", 0.2, -0.1)).unwrap();
        breadth = breadth.max(run.report.breadth_variation);
        tangent = tangent.max(run.report.tangent_opposition);
    }
    // h vanishes only for a planar curve with b1 = 0; then s* = c - s
    let mut linearity: f64 = 0.0;
    let mut planar_ok = true;
    for f in ["0", "y*z"] {
        let run = pipeline::run_pair(&pair_config(f, "0", 0.0, 0.3)).unwrap();
        breadth = breadth.max(run.report.breadth_variation);
        tangent = tangent.max(run.report.tangent_opposition);
        match run.report.s_star_linearity {
            Some(dev) => linearity = linearity.max(dev),
            None => planar_ok = false,
        }
    }
    // the verifier must notice a broken coefficient table
    let cfg = pair_config("y*z", "0.7 - s", 0.2, -0.1);
    let mut coeffs = pipeline::run_pair(&cfg).unwrap().coeffs;
    coeffs.m2.iter_mut().skip(1).for_each(|m| *m += 1e-2);
    let perturbed = pipeline::verify_coefficients(&cfg, coeffs).unwrap().report.breadth_variation;
    let elapsed = start.elapsed();
    let pass = breadth <= 1e-6 && tangent <= 1e-5 && planar_ok && linearity <= 1e-6 && perturbed >= 1e-3;
    let detail = format!(
        "breadth {breadth:.2e}, tangent {tangent:.2e}, s* linearity {linearity:.2e}, perturbed breadth {perturbed:.2e}"
    );
    assert!(announce(8, "end-to-end pair", pass, &detail, elapsed));
}

fn sweep_bytes(cfg: &SuiteConfig) -> Vec<u8> {
    let outcomes = theorem_suite(cfg).unwrap();
    let mut out = Vec::new();
    io::write_sweep(&mut out, &outcomes).unwrap();
    io::write_sweep_samples(&mut out, &outcomes).unwrap();
    io::write_json(&mut out, &outcomes).unwrap();
    out
}

#[test]
fn criterion_9_sweep_determinism() {
    let start = Instant::now();
    let cfg = SuiteConfig { samples: 8, seed: 42, ..SuiteConfig::default() };
    let first = sweep_bytes(&cfg);
    let second = sweep_bytes(&cfg);
    let elapsed = start.elapsed();
    let pass = first == second && !first.is_empty();
    let detail = format!("{} bytes, identical = {}", first.len(), first == second);
    assert!(announce(9, "sweep determinism", pass, &detail, elapsed));
}

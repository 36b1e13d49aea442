//! Randomized checks of the structure theorems for constant-breadth pairs.
//!
//! Every sample draws a metric, a curvature profile, an initial frame and coefficients,
//! integrates `α` and the coefficients, checks the theorem's hypotheses and then its
//! conclusion. Samples are seeded per `(seed, theorem, index)` so results do not depend on
//! thread count.

use nalgebra::{Matrix2, Matrix3, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed_form::{
    asymptotic_m23_closed_form, companions, fit_constants, geodesic_m23_closed_form,
    spacelike_asymptotic_m23_closed_form, Family, AMBIGUOUS_BAND,
};
use super::partner::{build_partner, verify_pair};
use super::systems::{coefficient_rhs, integrate_coefficients, BreadthCoefficients, Forcing};
use crate::darboux::{darboux_initial_frame, integrate_darboux, CaseTag, CurveKind, DarbouxProfile};
use crate::error::{Error, Result};
use crate::metric::{Point, WalkerMetric};

pub const BREADTH_TOL: f64 = 1e-8;
pub const TANGENT_TOL: f64 = 1e-5;
/// Constancy and vanishing of integrated coefficients.
pub const CONSTANT_TOL: f64 = 1e-7;
/// Agreement with closed forms.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
pub const PLANAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Theorem {
    TimelikeGeodesicConstantM1,
    TimelikeGeodesicClosedForm,
    TimelikeGeodesicVanishingM1,
    TimelikeAsymptoticConstantM1,
    TimelikeAsymptoticClosedForm,
    TimelikeAsymptoticVanishingM1,
    TimelikePrincipalClosedForm,
    TimelikePrincipalVanishingM1,
    Spacelike2iGeodesicConstantM1,
    Spacelike2iGeodesicClosedForm,
    Spacelike2iGeodesicVanishingM1,
    Spacelike2iPrincipalClosedForm,
    Spacelike2iPrincipalVanishingM1,
    Spacelike2iiAsymptoticConstantM1,
    Spacelike2iiAsymptoticClosedForm,
    Spacelike2iiAsymptoticVanishingM1,
    Spacelike2iiPrincipalVanishingM1,
}

impl From<Theorem> for String {
    fn from(t: Theorem) -> String {
        t.id().to_string()
    }
}

impl TryFrom<String> for Theorem {
    type Error = String;

    fn try_from(id: String) -> std::result::Result<Self, String> {
        Theorem::from_id(&id).ok_or_else(|| format!("unknown theorem `{id}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pattern {
    ConstantM1,
    ClosedForm,
    VanishingM1,
}

impl Theorem {
    pub const ALL: [Theorem; 17] = [
        Theorem::TimelikeGeodesicConstantM1,
        Theorem::TimelikeGeodesicClosedForm,
        Theorem::TimelikeGeodesicVanishingM1,
        Theorem::TimelikeAsymptoticConstantM1,
        Theorem::TimelikeAsymptoticClosedForm,
        Theorem::TimelikeAsymptoticVanishingM1,
        Theorem::TimelikePrincipalClosedForm,
        Theorem::TimelikePrincipalVanishingM1,
        Theorem::Spacelike2iGeodesicConstantM1,
        Theorem::Spacelike2iGeodesicClosedForm,
        Theorem::Spacelike2iGeodesicVanishingM1,
        Theorem::Spacelike2iPrincipalClosedForm,
        Theorem::Spacelike2iPrincipalVanishingM1,
        Theorem::Spacelike2iiAsymptoticConstantM1,
        Theorem::Spacelike2iiAsymptoticClosedForm,
        Theorem::Spacelike2iiAsymptoticVanishingM1,
        Theorem::Spacelike2iiPrincipalVanishingM1,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::TimelikeGeodesicConstantM1 => "timelike-geodesic-constant-m1",
            Theorem::TimelikeGeodesicClosedForm => "timelike-geodesic-closed-form",
            Theorem::TimelikeGeodesicVanishingM1 => "timelike-geodesic-vanishing-m1",
            Theorem::TimelikeAsymptoticConstantM1 => "timelike-asymptotic-constant-m1",
            Theorem::TimelikeAsymptoticClosedForm => "timelike-asymptotic-closed-form",
            Theorem::TimelikeAsymptoticVanishingM1 => "timelike-asymptotic-vanishing-m1",
            Theorem::TimelikePrincipalClosedForm => "timelike-principal-closed-form",
            Theorem::TimelikePrincipalVanishingM1 => "timelike-principal-vanishing-m1",
            Theorem::Spacelike2iGeodesicConstantM1 => "spacelike-2i-geodesic-constant-m1",
            Theorem::Spacelike2iGeodesicClosedForm => "spacelike-2i-geodesic-closed-form",
            Theorem::Spacelike2iGeodesicVanishingM1 => "spacelike-2i-geodesic-vanishing-m1",
            Theorem::Spacelike2iPrincipalClosedForm => "spacelike-2i-principal-closed-form",
            Theorem::Spacelike2iPrincipalVanishingM1 => "spacelike-2i-principal-vanishing-m1",
            Theorem::Spacelike2iiAsymptoticConstantM1 => "spacelike-2ii-asymptotic-constant-m1",
            Theorem::Spacelike2iiAsymptoticClosedForm => "spacelike-2ii-asymptotic-closed-form",
            Theorem::Spacelike2iiAsymptoticVanishingM1 => "spacelike-2ii-asymptotic-vanishing-m1",
            Theorem::Spacelike2iiPrincipalVanishingM1 => "spacelike-2ii-principal-vanishing-m1",
        }
    }

    pub fn from_id(id: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.id() == id)
    }

    /// What the theorem concludes, in one line.
    pub fn claim(self) -> &'static str {
        match self {
            Theorem::TimelikeGeodesicConstantM1 | Theorem::Spacelike2iGeodesicConstantM1 => {
                "constant m1 forces a helix with m3 = 0 and constant m2"
            }
            Theorem::TimelikeAsymptoticConstantM1 | Theorem::Spacelike2iiAsymptoticConstantM1 => {
                "constant m1 forces a helix with m2 = 0 and constant m3"
            }
            Theorem::TimelikeGeodesicVanishingM1 | Theorem::TimelikeAsymptoticVanishingM1 => {
                "m1 = 0 makes (m2, m3) rotate with the total torsion"
            }
            Theorem::Spacelike2iiAsymptoticVanishingM1 => "m1 = 0 makes (m2, m3) boost with the total torsion",
            Theorem::Spacelike2iGeodesicVanishingM1 => "m1 = 0 forces m3 = 0 and constant m2",
            Theorem::TimelikePrincipalVanishingM1 => "m1 = 0 forces a helix with constant m2, m3",
            Theorem::Spacelike2iPrincipalVanishingM1 => "m1 = 0 forces a planar curve with constant m2, m3",
            Theorem::Spacelike2iiPrincipalVanishingM1 => "m1 = 0 forces a helix or planar curve with constant m2, m3",
            _ => "along a helix the coefficients follow the closed form",
        }
    }

    pub fn case(self) -> CaseTag {
        use Theorem::*;
        match self {
            TimelikeGeodesicConstantM1
            | TimelikeGeodesicClosedForm
            | TimelikeGeodesicVanishingM1
            | TimelikeAsymptoticConstantM1
            | TimelikeAsymptoticClosedForm
            | TimelikeAsymptoticVanishingM1
            | TimelikePrincipalClosedForm
            | TimelikePrincipalVanishingM1 => CaseTag::TimelikeCase1,
            Spacelike2iGeodesicConstantM1
            | Spacelike2iGeodesicClosedForm
            | Spacelike2iGeodesicVanishingM1
            | Spacelike2iPrincipalClosedForm
            | Spacelike2iPrincipalVanishingM1 => CaseTag::SpacelikeCase2i,
            _ => CaseTag::SpacelikeCase2ii,
        }
    }

    pub fn kind(self) -> CurveKind {
        use Theorem::*;
        match self {
            TimelikeGeodesicConstantM1
            | TimelikeGeodesicClosedForm
            | TimelikeGeodesicVanishingM1
            | Spacelike2iGeodesicConstantM1
            | Spacelike2iGeodesicClosedForm
            | Spacelike2iGeodesicVanishingM1 => CurveKind::Geodesic,
            TimelikePrincipalClosedForm
            | TimelikePrincipalVanishingM1
            | Spacelike2iPrincipalClosedForm
            | Spacelike2iPrincipalVanishingM1
            | Spacelike2iiPrincipalVanishingM1 => CurveKind::PrincipalLine,
            _ => CurveKind::Asymptotic,
        }
    }

    fn pattern(self) -> Pattern {
        use Theorem::*;
        match self {
            TimelikeGeodesicConstantM1
            | TimelikeAsymptoticConstantM1
            | Spacelike2iGeodesicConstantM1
            | Spacelike2iiAsymptoticConstantM1 => Pattern::ConstantM1,
            TimelikeGeodesicClosedForm
            | TimelikeAsymptoticClosedForm
            | TimelikePrincipalClosedForm
            | Spacelike2iGeodesicClosedForm
            | Spacelike2iPrincipalClosedForm
            | Spacelike2iiAsymptoticClosedForm => Pattern::ClosedForm,
            _ => Pattern::VanishingM1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub step: f64,
    pub length: f64,
    /// Empty means every theorem.
    pub theorems: Vec<Theorem>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { samples: 100, seed: 0, step: 1e-3, length: 1.0, theorems: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Pass,
    Fail,
    Unsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub status: SampleStatus,
    pub detail: String,
    pub metric: String,
    pub kappa: String,
    pub tau: String,
    /// Largest conclusion residual.
    pub residual: f64,
    pub breadth_variation: f64,
    pub tangent_opposition: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Fewer than half of the samples satisfied the hypotheses.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremOutcome {
    pub theorem: Theorem,
    pub id: String,
    pub claim: String,
    pub case: CaseTag,
    pub kind: CurveKind,
    pub passed: usize,
    pub failed: usize,
    pub unsatisfiable: usize,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub first_failure: Option<String>,
    pub samples: Vec<SampleOutcome>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn sample_seed(seed: u64, theorem: Theorem, index: usize) -> u64 {
    let t = Theorem::ALL.iter().position(|&x| x == theorem).unwrap_or(0) as u64;
    splitmix(splitmix(splitmix(seed) ^ t) ^ index as u64)
}

const METRICS: [&str; 5] = ["0", "y*z", "0.5*sin(y) + 0.2*z^2", "0.3*y^2 - 0.2*z", "exp(0.2*y)*cos(z)"];

fn lit(x: f64) -> String {
    format!("({x:?})")
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

/// One randomized instance before any integration.
struct Draw {
    metric: String,
    kappa: String,
    tau: String,
    theta0: f64,
    p0: Point,
    phi: f64,
    eta: f64,
    m: [f64; 3],
}

fn draw(rng: &mut ChaCha8Rng, theorem: Theorem) -> Draw {
    let metric = METRICS[rng.random_range(0..METRICS.len())].to_string();
    let k0 = rng.random_range(0.5..1.5);
    let amp = rng.random_range(0.0..0.3);
    let omega = rng.random_range(0.5..3.0);
    let psi = rng.random_range(0.0..std::f64::consts::TAU);
    let kappa = format!("{}*(1 + {}*sin({}*s + {}))", lit(k0), lit(amp), lit(omega), lit(psi));
    let shape = rng.random_range(0.0..1.0);
    let c0 = signed(rng, 0.3, 1.5);
    let tau = if shape < 0.7 {
        format!("{}*{}", lit(c0), kappa)
    } else if shape < 0.85 {
        "0".to_string()
    } else {
        let drift = signed(rng, 0.5, 1.5);
        format!("{}*{} + {}*(s - 0.5)", lit(c0), kappa, lit(drift))
    };
    let theta0 = if theorem.pattern() == Pattern::ClosedForm { 0.0 } else { rng.random_range(-0.5..0.5) };
    let p0 = Point::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
    let phi = rng.random_range(-0.4..0.4);
    let eta = rng.random_range(-0.4..0.4);
    let m = match theorem.pattern() {
        Pattern::ConstantM1 => [signed(rng, 0.05, 0.3), 0.0, 0.0],
        Pattern::VanishingM1 => [0.0, signed(rng, 0.05, 0.25), signed(rng, 0.05, 0.25)],
        Pattern::ClosedForm => [signed(rng, 0.02, 0.1), signed(rng, 0.02, 0.1), signed(rng, 0.02, 0.1)],
    };
    Draw { metric, kappa, tau, theta0, p0, phi, eta, m }
}

/// Linear matrix `A(s)` of `m' = A m` under a linear forcing.
fn system_matrix(profile: &DarbouxProfile, forcing: &Forcing, s: f64) -> Result<Matrix3<f64>> {
    let rhs = coefficient_rhs(profile.case(), profile.kind())?;
    let sc = profile.scalars(s)?;
    let mut a = Matrix3::zeros();
    for k in 0..3 {
        let mut m = [0.0; 3];
        m[k] = 1.0;
        let free = rhs.unforced(sc, m);
        let col = rhs.eval(sc, m, forcing.h(s, free[0])?);
        for r in 0..3 {
            a[(r, k)] = col[r];
        }
    }
    Ok(a)
}

/// `(m2, m3)` making `m1' = m1'' = 0` at `s = 0`.
fn constant_m1_data(profile: &DarbouxProfile, forcing: &Forcing, m1: f64) -> Result<[f64; 3]> {
    let d = 1e-3;
    let a = system_matrix(profile, forcing, 0.0)?;
    let da = (system_matrix(profile, forcing, -2.0 * d)? - system_matrix(profile, forcing, -d)? * 8.0
        + system_matrix(profile, forcing, d)? * 8.0
        - system_matrix(profile, forcing, 2.0 * d)?)
        / (12.0 * d);
    let b = da + a * a;
    let lhs = Matrix2::new(a[(0, 1)], a[(0, 2)], b[(0, 1)], b[(0, 2)]);
    let scale = lhs.abs().max().max(1e-300);
    if lhs.determinant().abs() <= 1e-10 * scale * scale {
        return Err(Error::HypothesisUnsatisfiable("no initial data keeps m1 constant".into()));
    }
    let rhs = Vector2::new(-a[(0, 0)] * m1, -b[(0, 0)] * m1);
    let sol =
        lhs.lu().solve(&rhs).ok_or_else(|| Error::HypothesisUnsatisfiable("singular constant-m1 system".into()))?;
    Ok([m1, sol[0], sol[1]])
}

fn max_dev(values: &[f64], target: impl Fn(usize) -> f64) -> f64 {
    values.iter().enumerate().map(|(i, v)| (v - target(i)).abs()).fold(0.0, f64::max)
}

fn spread(values: &[f64]) -> f64 {
    max_dev(values, |_| values[0])
}

struct Checked {
    residual: f64,
    failure: Option<String>,
}

impl Checked {
    fn new() -> Self {
        Checked { residual: 0.0, failure: None }
    }

    fn require(&mut self, label: &str, value: f64, tol: f64) {
        self.residual = self.residual.max(value);
        if !(value <= tol) && self.failure.is_none() {
            self.failure = Some(format!("{label} = {value:.3e} exceeds {tol:.0e}"));
        }
    }

    fn require_flag(&mut self, label: &str, ok: bool) {
        if !ok && self.failure.is_none() {
            self.failure = Some(label.to_string());
        }
    }
}

fn unsat(msg: impl Into<String>) -> Error {
    Error::HypothesisUnsatisfiable(msg.into())
}

fn run_sample(theorem: Theorem, cfg: &SuiteConfig, index: usize) -> SampleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(cfg.seed, theorem, index));
    let d = draw(&mut rng, theorem);
    let mut out = SampleOutcome {
        index,
        status: SampleStatus::Pass,
        detail: String::new(),
        metric: d.metric.clone(),
        kappa: d.kappa.clone(),
        tau: d.tau.clone(),
        residual: 0.0,
        breadth_variation: 0.0,
        tangent_opposition: 0.0,
    };
    match evaluate(theorem, cfg, &d, &mut out) {
        Ok(checked) => {
            out.residual = checked.residual;
            if let Some(reason) = checked.failure {
                out.status = SampleStatus::Fail;
                out.detail = reason;
            }
        }
        Err(Error::HypothesisUnsatisfiable(reason)) => {
            out.status = SampleStatus::Unsatisfiable;
            out.detail = reason;
        }
        Err(e) => {
            out.status = SampleStatus::Fail;
            out.detail = format!("numeric failure: {e}");
        }
    }
    out
}

fn evaluate(theorem: Theorem, cfg: &SuiteConfig, d: &Draw, out: &mut SampleOutcome) -> Result<Checked> {
    let case = theorem.case();
    let kind = theorem.kind();
    let g = WalkerMetric::parse(&d.metric)?;
    let profile = DarbouxProfile::parse(case, kind, &d.kappa, &d.tau, None, d.theta0, cfg.length)?;
    let forcing = match theorem.pattern() {
        Pattern::VanishingM1 => Forcing::HoldM1,
        _ => Forcing::conserving(case),
    };
    let grid: Vec<f64> = {
        let n = (cfg.length / cfg.step).round().max(1.0) as usize;
        (0..=n).map(|i| cfg.length * i as f64 / n as f64).collect()
    };
    let tau_values = grid.iter().map(|&s| profile.tau(s)).collect::<Result<Vec<_>>>()?;
    let kappa_values = grid.iter().map(|&s| profile.kappa(s)).collect::<Result<Vec<_>>>()?;

    // hypotheses on the data that can be checked before integration
    let mut closed = None;
    let m0 = match theorem.pattern() {
        Pattern::ConstantM1 => constant_m1_data(&profile, &forcing, d.m[0])?,
        Pattern::VanishingM1 => d.m,
        Pattern::ClosedForm => {
            let family = Family::of(case, kind)?;
            let ratios = grid.iter().map(|&s| family.ratio(&profile, s)).collect::<Result<Vec<_>>>()?;
            let c = ratios[0];
            if spread(&ratios) > 1e-9 * c.abs().max(1.0) {
                return Err(unsat("curve is not a helix"));
            }
            if c == 0.0 {
                return Err(unsat("curve is planar"));
            }
            let k = family.ode_coefficient(c).abs();
            if k > super::closed_form::POLY_BAND && k < AMBIGUOUS_BAND {
                return Err(unsat("closed-form branch is ambiguous"));
            }
            closed = Some((family, c));
            d.m
        }
    };

    let frame0 = darboux_initial_frame(&g, &d.p0, case, d.phi, d.eta)?;
    let frames = integrate_darboux(&g, &profile, d.p0, frame0, cfg.step)?;
    let coeffs = integrate_coefficients(&profile, &forcing, m0, cfg.step)?;

    let mut check = Checked::new();
    match theorem.pattern() {
        Pattern::ConstantM1 => {
            if spread(&coeffs.m1) > CONSTANT_TOL {
                return Err(unsat("m1 does not stay constant"));
            }
        }
        Pattern::VanishingM1 => {
            if max_dev(&coeffs.m1, |_| 0.0) > CONSTANT_TOL {
                return Err(unsat("m1 does not stay zero"));
            }
        }
        Pattern::ClosedForm => {}
    }

    let pair = build_partner(&frames, &coeffs, 0.0)?;
    let report = verify_pair(&g, &pair, Some(&profile))?;
    out.breadth_variation = report.breadth_variation;
    out.tangent_opposition = report.tangent_opposition;
    // the pair itself must be of constant breadth for the theorem to apply
    if report.breadth_variation > BREADTH_TOL || report.tangent_opposition > TANGENT_TOL {
        check.failure = Some(format!(
            "pair is not of constant breadth: breadth variation {:.3e}, tangent opposition {:.3e}",
            report.breadth_variation, report.tangent_opposition
        ));
        return Ok(check);
    }
    let helix = report.helix.map(|h| h.is_helix).unwrap_or(false);
    let planar = tau_values.iter().all(|t| t.abs() <= PLANAR_TOL);

    use Theorem::*;
    match theorem {
        TimelikeGeodesicConstantM1 | Spacelike2iGeodesicConstantM1 => {
            check.require_flag("curve is not a helix", helix);
            check.require("max |m3|", max_dev(&coeffs.m3, |_| 0.0), CONSTANT_TOL);
            check.require("m2 variation", spread(&coeffs.m2), CONSTANT_TOL);
        }
        TimelikeAsymptoticConstantM1 | Spacelike2iiAsymptoticConstantM1 => {
            check.require_flag("curve is not a helix", helix);
            check.require("max |m2|", max_dev(&coeffs.m2, |_| 0.0), CONSTANT_TOL);
            check.require("m3 variation", spread(&coeffs.m3), CONSTANT_TOL);
        }
        TimelikeGeodesicVanishingM1 | TimelikeAsymptoticVanishingM1 | Spacelike2iiAsymptoticVanishingM1 => {
            check_rotation(theorem, &profile, &coeffs, &grid, &kappa_values, &mut check)?;
        }
        Spacelike2iGeodesicVanishingM1 => {
            check.require("max |m3|", max_dev(&coeffs.m3, |_| 0.0), CONSTANT_TOL);
            check.require("m2 variation", spread(&coeffs.m2), CONSTANT_TOL);
        }
        TimelikePrincipalVanishingM1 | Spacelike2iPrincipalVanishingM1 | Spacelike2iiPrincipalVanishingM1 => {
            check.require("m2 variation", spread(&coeffs.m2), CONSTANT_TOL);
            check.require("m3 variation", spread(&coeffs.m3), CONSTANT_TOL);
            let shape_ok = match theorem {
                TimelikePrincipalVanishingM1 => helix,
                Spacelike2iPrincipalVanishingM1 => planar,
                _ => helix || planar,
            };
            check.require_flag("curve shape differs from the conclusion", shape_ok);
        }
        _ => {
            let (family, c) = closed.expect("closed-form data");
            check_closed_form(family, c, &profile, &coeffs, &grid, &mut check)?;
        }
    }
    Ok(check)
}

fn check_rotation(
    theorem: Theorem,
    profile: &DarbouxProfile,
    coeffs: &BreadthCoefficients,
    grid: &[f64],
    kappa: &[f64],
    check: &mut Checked,
) -> Result<()> {
    let (m2, m3) = (coeffs.m2[0], coeffs.m3[0]);
    let mut worst_m: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    for (i, &s) in grid.iter().enumerate() {
        let w = profile.w(s)?;
        let (p2, p3, h) = match theorem {
            Theorem::TimelikeGeodesicVanishingM1 => {
                let (a, b) = geodesic_m23_closed_form(m3, m2, w);
                (a, b, kappa[i] * b)
            }
            Theorem::TimelikeAsymptoticVanishingM1 => {
                let (a, b) = asymptotic_m23_closed_form(-m2, m3, w);
                (a, b, -kappa[i] * a)
            }
            _ => {
                let (a, b) = spacelike_asymptotic_m23_closed_form(m2, m3, w);
                (a, b, kappa[i] * a)
            }
        };
        worst_m = worst_m.max((coeffs.m2[i] - p2).abs()).max((coeffs.m3[i] - p3).abs());
        worst_h = worst_h.max((coeffs.h[i] - h).abs());
    }
    check.require("rotation mismatch", worst_m, CLOSED_FORM_TOL);
    check.require("h mismatch", worst_h, CLOSED_FORM_TOL);
    Ok(())
}

fn check_closed_form(
    family: Family,
    c: f64,
    profile: &DarbouxProfile,
    coeffs: &BreadthCoefficients,
    grid: &[f64],
    check: &mut Checked,
) -> Result<()> {
    let (case, kind) = (profile.case(), profile.kind());
    let v0 = family.variable(profile, 0.0)?;
    let a = fit_constants(case, kind, c, coeffs.m(0), v0)?;
    let m1 = super::closed_form::closed_form_m1_formula(case, kind, c, a)?;
    let comps = companions(case, kind, c, a)?;
    let eval = |f: &crate::expr::Formula, v: f64| {
        f.eval(&[v]).map_err(|e| Error::ExpressionSingular { name: f.source().to_string(), at: v, reason: e.0 })
    };
    let mut worst1: f64 = 0.0;
    let mut worst23: f64 = 0.0;
    for (i, &s) in grid.iter().enumerate() {
        let v = family.variable(profile, s)?;
        let scale = 1.0 + coeffs.m(i).iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        worst1 = worst1.max((coeffs.m1[i] - eval(&m1, v)?).abs() / scale);
        if let Some((f2, f3)) = &comps {
            worst23 = worst23
                .max((coeffs.m2[i] - eval(f2, v)?).abs() / scale)
                .max((coeffs.m3[i] - eval(f3, v)?).abs() / scale);
        }
    }
    check.require("m1 closed-form mismatch", worst1, CLOSED_FORM_TOL);
    check.require("companion mismatch", worst23, CLOSED_FORM_TOL);
    Ok(())
}

fn summarize(theorem: Theorem, samples: Vec<SampleOutcome>) -> TheoremOutcome {
    let count = |st: SampleStatus| samples.iter().filter(|s| s.status == st).count();
    let (passed, failed, unsatisfiable) =
        (count(SampleStatus::Pass), count(SampleStatus::Fail), count(SampleStatus::Unsatisfiable));
    let verdict = if 2 * unsatisfiable > samples.len() {
        Verdict::Inconclusive
    } else if failed > 0 {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let first_failure = samples
        .iter()
        .find(|s| s.status == SampleStatus::Fail)
        .map(|s| format!("sample {}: {} (f = {}, κ = {}, τ = {})", s.index, s.detail, s.metric, s.kappa, s.tau));
    let max_residual =
        samples.iter().filter(|s| s.status != SampleStatus::Unsatisfiable).map(|s| s.residual).fold(0.0, f64::max);
    TheoremOutcome {
        theorem,
        id: theorem.id().to_string(),
        claim: theorem.claim().to_string(),
        case: theorem.case(),
        kind: theorem.kind(),
        passed,
        failed,
        unsatisfiable,
        verdict,
        max_residual,
        first_failure,
        samples,
    }
}

/// Runs the selected theorems; output order follows [`Theorem::ALL`] and sample index.
pub fn theorem_suite(cfg: &SuiteConfig) -> Result<Vec<TheoremOutcome>> {
    if cfg.samples == 0 {
        return Err(Error::Config("suite needs at least one sample".into()));
    }
    if !(cfg.step > 0.0 && cfg.length > 0.0 && cfg.step < cfg.length / 8.0) {
        return Err(Error::Config(format!("step {} and length {} are incompatible", cfg.step, cfg.length)));
    }
    let selected: Vec<Theorem> =
        Theorem::ALL.into_iter().filter(|t| cfg.theorems.is_empty() || cfg.theorems.contains(t)).collect();
    let jobs: Vec<(Theorem, usize)> = selected.iter().flat_map(|&t| (0..cfg.samples).map(move |i| (t, i))).collect();
    let results: Vec<SampleOutcome> = jobs.par_iter().map(|&(t, i)| run_sample(t, cfg, i)).collect();
    let mut chunks = results.into_iter();
    Ok(selected.into_iter().map(|t| summarize(t, chunks.by_ref().take(cfg.samples).collect())).collect())
}

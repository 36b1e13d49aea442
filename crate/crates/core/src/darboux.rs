//! Darboux frames `{T, Y, U}` of curves on timelike surfaces.
//!
//! `U` is the unit (spacelike) surface normal and `Y = U × T`. Structure equations:
//!
//! ```text
//! timelike T:   ∇T =  κg Y + κn U    ∇Y =  κg T + τg U    ∇U =  κn T - τg Y
//! spacelike T:  ∇T = -κg Y + κn U    ∇Y = -κg T + τg U    ∇U = -κn T + τg Y
//! ```
//!
//! with `κg = g(∇T, Y)`, `κn = g(∇T, U)`, `τg = g(∇Y, U)`. For spacelike `T` the vector `Y`
//! is timelike. Relative to the Frenet frame (binormal `B = -ε1 (T × N)`):
//!
//! | case | Y | U | κg | κn | τg |
//! |------|---|---|----|----|----|
//! | timelike | cos θ N + sin θ B | -sin θ N + cos θ B | κ cos θ | -κ sin θ | θ' - τ |
//! | spacelike, N spacelike | sinh θ N + cosh θ B | cosh θ N + sinh θ B | κ sinh θ | κ cosh θ | θ' + τ |
//! | spacelike, N timelike | cosh θ N + sinh θ B | sinh θ N + cosh θ B | κ cosh θ | κ sinh θ | θ' - τ |

use std::fmt;

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::curve::UnitSpeedCurve;
use crate::error::{Error, Result};
use crate::expr::Formula;
use crate::frenet::{
    frenet_frame, integrate_frame, lorentz_mix, pseudo_orthonormal_frame, sample_derivative, stencil_at, FrameSample,
    FrameSolution, Structure, KAPPA_MIN,
};
use crate::metric::{connection_term, cross_with, inner_with, Point, Tangent, WalkerMetric};
use crate::ode::CumulativeIntegral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "timelike")]
    TimelikeCase1,
    #[serde(rename = "spacelike_2i")]
    SpacelikeCase2i,
    #[serde(rename = "spacelike_2ii")]
    SpacelikeCase2ii,
}

impl CaseTag {
    pub const ALL: [CaseTag; 3] = [CaseTag::TimelikeCase1, CaseTag::SpacelikeCase2i, CaseTag::SpacelikeCase2ii];

    /// `(ε1, ε2, ε3)` of the Frenet frame.
    pub fn frenet_signs(self) -> [f64; 3] {
        match self {
            CaseTag::TimelikeCase1 => [-1.0, 1.0, 1.0],
            CaseTag::SpacelikeCase2i => [1.0, 1.0, -1.0],
            CaseTag::SpacelikeCase2ii => [1.0, -1.0, 1.0],
        }
    }

    /// Signs of `g(T,T)`, `g(Y,Y)`, `g(U,U)`.
    pub fn darboux_signs(self) -> [f64; 3] {
        match self {
            CaseTag::TimelikeCase1 => [-1.0, 1.0, 1.0],
            _ => [1.0, -1.0, 1.0],
        }
    }

    pub fn from_signs(eps1: f64, eps2: f64) -> Option<CaseTag> {
        match (eps1 < 0.0, eps2 > 0.0) {
            (true, _) => Some(CaseTag::TimelikeCase1),
            (false, true) => Some(CaseTag::SpacelikeCase2i),
            (false, false) => Some(CaseTag::SpacelikeCase2ii),
        }
    }

    pub fn structure(self, kg: f64, kn: f64, tg: f64) -> Structure {
        match self {
            CaseTag::TimelikeCase1 => [[0.0, kg, kn], [kg, 0.0, tg], [kn, -tg, 0.0]],
            _ => [[0.0, -kg, kn], [-kg, 0.0, tg], [-kn, tg, 0.0]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::TimelikeCase1 => "timelike",
            CaseTag::SpacelikeCase2i => "spacelike_2i",
            CaseTag::SpacelikeCase2ii => "spacelike_2ii",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Geodesic,
    Asymptotic,
    PrincipalLine,
    General,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Geodesic => "geodesic",
            CurveKind::Asymptotic => "asymptotic",
            CurveKind::PrincipalLine => "principal_line",
            CurveKind::General => "general",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kinds each case admits. Geodesics need `κn ≠ 0`-compatible angles and asymptotic lines
/// need `κg ≠ 0`-compatible ones, so spacelike cases each lose one kind.
pub fn check_supported(case: CaseTag, kind: CurveKind) -> Result<()> {
    let ok = matches!(
        (case, kind),
        (_, CurveKind::General | CurveKind::PrincipalLine)
            | (CaseTag::TimelikeCase1, _)
            | (CaseTag::SpacelikeCase2i, CurveKind::Geodesic)
            | (CaseTag::SpacelikeCase2ii, CurveKind::Asymptotic)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedCombination { case: case.to_string(), kind: kind.to_string() })
    }
}

/// `(Y, U)` from the Frenet normal and binormal.
pub fn darboux_from_frenet(
    case: CaseTag,
    theta: f64,
    n: Vector3<f64>,
    b: Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    match case {
        CaseTag::TimelikeCase1 => {
            let (s, c) = theta.sin_cos();
            (c * n + s * b, -s * n + c * b)
        }
        CaseTag::SpacelikeCase2i => {
            let (s, c) = (theta.sinh(), theta.cosh());
            (s * n + c * b, c * n + s * b)
        }
        CaseTag::SpacelikeCase2ii => {
            let (s, c) = (theta.sinh(), theta.cosh());
            (c * n + s * b, s * n + c * b)
        }
    }
}

/// `(N, B)` from `(Y, U)`; inverse of [`darboux_from_frenet`].
pub fn frenet_from_darboux(
    case: CaseTag,
    theta: f64,
    y: Vector3<f64>,
    u: Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    match case {
        CaseTag::TimelikeCase1 => {
            let (s, c) = theta.sin_cos();
            (c * y - s * u, s * y + c * u)
        }
        CaseTag::SpacelikeCase2i => {
            let (s, c) = (theta.sinh(), theta.cosh());
            (c * u - s * y, c * y - s * u)
        }
        CaseTag::SpacelikeCase2ii => {
            let (s, c) = (theta.sinh(), theta.cosh());
            (c * y - s * u, c * u - s * y)
        }
    }
}

/// `(κg, κn, τg)` from Frenet data and the angle `θ` with derivative `θ'`.
pub fn scalars_from_frenet(case: CaseTag, kappa: f64, tau: f64, theta: f64, dtheta: f64) -> [f64; 3] {
    match case {
        CaseTag::TimelikeCase1 => [kappa * theta.cos(), -kappa * theta.sin(), dtheta - tau],
        CaseTag::SpacelikeCase2i => [kappa * theta.sinh(), kappa * theta.cosh(), dtheta + tau],
        CaseTag::SpacelikeCase2ii => [kappa * theta.cosh(), kappa * theta.sinh(), dtheta - tau],
    }
}

/// Recovers `θ` from the geodesic and normal curvature.
pub fn theta_from_scalars(case: CaseTag, kappa_g: f64, kappa_n: f64) -> Result<f64> {
    if kappa_g.abs() <= KAPPA_MIN && kappa_n.abs() <= KAPPA_MIN {
        return Err(Error::AngleUndefined);
    }
    let ratio = match case {
        CaseTag::TimelikeCase1 => return Ok((-kappa_n).atan2(kappa_g)),
        CaseTag::SpacelikeCase2i => kappa_g / kappa_n,
        CaseTag::SpacelikeCase2ii => kappa_n / kappa_g,
    };
    if !(ratio.abs() < 1.0) {
        return Err(Error::HyperbolicDomain { ratio });
    }
    Ok(ratio.atanh())
}

#[derive(Debug, Clone)]
enum ThetaLaw {
    Fixed(f64),
    /// `θ = θ0 + sign ∫τ ds`.
    Principal {
        theta0: f64,
        sign: f64,
    },
    Given {
        theta: Formula,
        dtheta: Formula,
    },
}

/// Curvature, torsion and surface angle of a manufactured curve as functions of arc length.
#[derive(Debug, Clone)]
pub struct DarbouxProfile {
    case: CaseTag,
    kind: CurveKind,
    kappa: Formula,
    tau: Formula,
    theta: ThetaLaw,
    z: CumulativeIntegral,
    w: CumulativeIntegral,
    s_max: f64,
}

fn eval_s(f: &Formula, s: f64) -> Result<f64> {
    f.eval(&[s]).map_err(|e| Error::ExpressionSingular { name: f.source().to_string(), at: s, reason: e.0 })
}

impl DarbouxProfile {
    /// `theta` is required for [`CurveKind::General`] and ignored otherwise; `theta0` is the
    /// initial angle of principal lines. All formulas are in the variable `s`.
    pub fn new(
        case: CaseTag,
        kind: CurveKind,
        kappa: Formula,
        tau: Formula,
        theta: Option<Formula>,
        theta0: f64,
        s_max: f64,
    ) -> Result<Self> {
        check_supported(case, kind)?;
        for f in [Some(&kappa), Some(&tau), theta.as_ref()].into_iter().flatten() {
            if f.vars() != ["s"] {
                return Err(Error::Config(format!("profile expression `{}` must be in `s`", f.source())));
            }
        }
        let theta = match (kind, case) {
            (CurveKind::General, _) => {
                let theta = theta.ok_or_else(|| Error::Config("general curves need a theta expression".into()))?;
                let dtheta = theta.derivative("s");
                ThetaLaw::Given { theta, dtheta }
            }
            (CurveKind::PrincipalLine, CaseTag::SpacelikeCase2i) => ThetaLaw::Principal { theta0, sign: -1.0 },
            (CurveKind::PrincipalLine, _) => ThetaLaw::Principal { theta0, sign: 1.0 },
            (CurveKind::Geodesic, CaseTag::TimelikeCase1) => ThetaLaw::Fixed(std::f64::consts::FRAC_PI_2),
            _ => ThetaLaw::Fixed(0.0),
        };
        let panel = (s_max / 64.0).min(0.05);
        let z = CumulativeIntegral::build(|s| eval_s(&kappa, s), 0.0, s_max, panel)?;
        let w = CumulativeIntegral::build(|s| eval_s(&tau, s), 0.0, s_max, panel)?;
        Ok(DarbouxProfile { case, kind, kappa, tau, theta, z, w, s_max })
    }

    /// Convenience constructor parsing expressions in `s`.
    pub fn parse(
        case: CaseTag,
        kind: CurveKind,
        kappa: &str,
        tau: &str,
        theta: Option<&str>,
        theta0: f64,
        s_max: f64,
    ) -> Result<Self> {
        let theta = theta.map(|t| Formula::parse(t, &["s"])).transpose()?;
        DarbouxProfile::new(
            case,
            kind,
            Formula::parse(kappa, &["s"])?,
            Formula::parse(tau, &["s"])?,
            theta,
            theta0,
            s_max,
        )
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn kappa(&self, s: f64) -> Result<f64> {
        eval_s(&self.kappa, s)
    }

    pub fn tau(&self, s: f64) -> Result<f64> {
        eval_s(&self.tau, s)
    }

    /// `z(s) = ∫_0^s κ`.
    pub fn z(&self, s: f64) -> Result<f64> {
        self.z.at(&mut |x| eval_s(&self.kappa, x), s)
    }

    /// `w(s) = ∫_0^s τ`.
    pub fn w(&self, s: f64) -> Result<f64> {
        self.w.at(&mut |x| eval_s(&self.tau, x), s)
    }

    pub fn theta(&self, s: f64) -> Result<f64> {
        match &self.theta {
            ThetaLaw::Fixed(t) => Ok(*t),
            ThetaLaw::Principal { theta0, sign } => Ok(theta0 + sign * self.w(s)?),
            ThetaLaw::Given { theta, .. } => eval_s(theta, s),
        }
    }

    pub fn dtheta(&self, s: f64) -> Result<f64> {
        match &self.theta {
            ThetaLaw::Fixed(_) => Ok(0.0),
            ThetaLaw::Principal { sign, .. } => Ok(sign * self.tau(s)?),
            ThetaLaw::Given { dtheta, .. } => eval_s(dtheta, s),
        }
    }

    /// `(κg, κn, τg)` at `s`.
    pub fn scalars(&self, s: f64) -> Result<[f64; 3]> {
        let kappa = self.kappa(s)?;
        let tau = self.tau(s)?;
        let mut out = scalars_from_frenet(self.case, kappa, tau, self.theta(s)?, self.dtheta(s)?);
        // exact zeros for the defining condition of the kind
        match self.kind {
            CurveKind::Geodesic => out[0] = 0.0,
            CurveKind::Asymptotic => out[1] = 0.0,
            CurveKind::PrincipalLine => out[2] = 0.0,
            CurveKind::General => {}
        }
        Ok(out)
    }
}

/// A pseudo-orthonormal `(T, Y, U)` at `p0` with `Y = U × T`, mixed by a rotation `phi`
/// and a boost `eta`.
pub fn darboux_initial_frame(
    g: &WalkerMetric,
    p0: &Point,
    case: CaseTag,
    phi: f64,
    eta: f64,
) -> Result<[Vector3<f64>; 3]> {
    let signs = case.darboux_signs();
    let mut e = lorentz_mix(pseudo_orthonormal_frame(g, p0, signs)?, signs, phi, eta);
    e[1] = cross_with(g.f_at(p0)?, &e[2], &e[0]);
    Ok(e)
}

/// Integrates the Darboux structure equations for the profile's scalars.
pub fn integrate_darboux(
    g: &WalkerMetric,
    profile: &DarbouxProfile,
    p0: Point,
    frame0: [Vector3<f64>; 3],
    step: f64,
) -> Result<FrameSolution> {
    let case = profile.case();
    let f = g.f_at(&p0)?;
    if (cross_with(f, &frame0[2], &frame0[0]) - frame0[1]).amax() > 1e-9 {
        return Err(Error::Config("initial frame must satisfy Y = U × T".into()));
    }
    integrate_frame(
        g,
        |s| {
            let [kg, kn, tg] = profile.scalars(s)?;
            Ok(case.structure(kg, kn, tg))
        },
        case.darboux_signs(),
        p0,
        frame0,
        profile.s_max(),
        step,
    )
}

/// `(T, Y, U)` samples obtained by rotating Frenet samples through `θ(s_i)`.
/// Structure entries are left zero; fill them with [`measure_darboux_scalars`].
pub fn rotate_frenet_samples(case: CaseTag, frenet: &[FrameSample], theta: &[f64]) -> Result<Vec<FrameSample>> {
    if frenet.len() != theta.len() {
        return Err(Error::GridMismatch(format!("{} frames but {} angles", frenet.len(), theta.len())));
    }
    Ok(frenet
        .iter()
        .zip(theta)
        .map(|(s, &th)| {
            let (y, u) = darboux_from_frenet(case, th, s.e[1], s.e[2]);
            FrameSample { s: s.s, point: s.point, e: [s.e[0], y, u], structure: [[0.0; 3]; 3] }
        })
        .collect())
}

/// Measures `(κg, κn, τg)` on sampled `(T, Y, U)` frames by five-point stencils and writes the
/// case's structure matrix into each sample.
pub fn measure_darboux_scalars(
    g: &WalkerMetric,
    case: CaseTag,
    samples: &mut [FrameSample],
    step: f64,
) -> Result<Vec<[f64; 3]>> {
    if samples.len() < 5 {
        return Err(Error::GridMismatch("need at least five frame samples".into()));
    }
    let ts: Vec<Vector3<f64>> = samples.iter().map(|s| s.e[0]).collect();
    let ys: Vec<Vector3<f64>> = samples.iter().map(|s| s.e[1]).collect();
    let mut out = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        let sample = &mut samples[i];
        let jet = g.jet(&sample.point)?;
        let [t, y, u] = sample.e;
        let dt = sample_derivative(&ts, i, step) + connection_term(&jet, &t, &t);
        let dy = sample_derivative(&ys, i, step) + connection_term(&jet, &t, &y);
        let sc = [inner_with(jet.f, &dt, &y), inner_with(jet.f, &dt, &u), inner_with(jet.f, &dy, &u)];
        sample.structure = case.structure(sc[0], sc[1], sc[2]);
        out.push(sc);
    }
    Ok(out)
}

/// Residual report of the case's three structure equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureReport {
    pub tangent: f64,
    pub side: f64,
    pub normal: f64,
}

impl StructureReport {
    pub fn max(&self) -> f64 {
        self.tangent.max(self.side).max(self.normal)
    }
}

/// Residuals of the structure equations on a uniform grid of `(T, Y, U)` samples whose
/// structure matrices hold the reported scalars.
pub fn verify_structure_equations(g: &WalkerMetric, samples: &[FrameSample], step: f64) -> Result<StructureReport> {
    let r = crate::frenet::frame_residuals(g, samples, step)?;
    Ok(StructureReport { tangent: r[0], side: r[1], normal: r[2] })
}

/// A parametrized surface `r(u, v)` with exact partials.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    r: [Formula; 3],
    ru: [Formula; 3],
    rv: [Formula; 3],
}

impl SurfacePatch {
    pub fn parse(x: &str, y: &str, z: &str) -> Result<Self> {
        let vars = &["u", "v"];
        let r = [Formula::parse(x, vars)?, Formula::parse(y, vars)?, Formula::parse(z, vars)?];
        let ru = r.clone().map(|c| c.derivative("u"));
        let rv = r.clone().map(|c| c.derivative("v"));
        Ok(SurfacePatch { r, ru, rv })
    }

    fn eval3(fs: &[Formula; 3], u: f64, v: f64) -> Result<Vector3<f64>> {
        let mut out = Vector3::zeros();
        for (i, f) in fs.iter().enumerate() {
            out[i] = f.eval(&[u, v]).map_err(|e| Error::ExpressionSingular {
                name: f.source().to_string(),
                at: u,
                reason: format!("{} at (u, v) = ({u}, {v})", e.0),
            })?;
        }
        Ok(out)
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Point> {
        Ok(Point::from_coords(&Self::eval3(&self.r, u, v)?))
    }

    pub fn partials(&self, u: f64, v: f64) -> Result<(Vector3<f64>, Vector3<f64>)> {
        Ok((Self::eval3(&self.ru, u, v)?, Self::eval3(&self.rv, u, v)?))
    }

    /// Closest patch parameters to `p` in chart coordinates (Gauss–Newton from `guess`);
    /// returns the parameters and the remaining chart distance.
    pub fn project(&self, p: &Point, guess: (f64, f64)) -> Result<((f64, f64), f64)> {
        let (mut u, mut v) = guess;
        let target = p.coords();
        for _ in 0..60 {
            let r = Self::eval3(&self.r, u, v)?;
            let (ru, rv) = self.partials(u, v)?;
            let resid = target - r;
            let jtj = Matrix2::new(ru.dot(&ru), ru.dot(&rv), ru.dot(&rv), rv.dot(&rv));
            let rhs = Vector2::new(ru.dot(&resid), rv.dot(&resid));
            let delta = jtj.lu().solve(&rhs).ok_or(Error::DegeneratePatch { u, v })?;
            u += delta[0];
            v += delta[1];
            if delta.amax() < 1e-15 * (1.0 + u.abs().max(v.abs())) {
                break;
            }
        }
        let dist = (target - Self::eval3(&self.r, u, v)?).norm();
        Ok(((u, v), dist))
    }
}

/// Unit normal `n / √g(n, n)` with `n = r_u × r_v`.
pub fn surface_normal(g: &WalkerMetric, surface: &SurfacePatch, u: f64, v: f64) -> Result<Tangent> {
    let p = surface.position(u, v)?;
    let (ru, rv) = surface.partials(u, v)?;
    let f = g.f_at(&p)?;
    let n = cross_with(f, &ru, &rv);
    if ru.cross(&rv).norm() <= 1e-12 * ru.norm() * rv.norm() || n.amax() == 0.0 {
        return Err(Error::DegeneratePatch { u, v });
    }
    let q = inner_with(f, &n, &n);
    if q <= 1e-12 * n.norm_squared().max(1.0) {
        return Err(Error::NotTimelikeSurface { u, v, norm: q });
    }
    Ok(Tangent::new(p, n / q.sqrt()))
}

pub const OFF_SURFACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxApparatus {
    pub s: f64,
    pub t: Tangent,
    pub y: Tangent,
    pub u: Tangent,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_g: f64,
    /// `None` when both curvatures vanish or the hyperbolic angle is out of range.
    pub theta: Option<f64>,
    pub case_tag: CaseTag,
    /// Surface parameters of the curve point.
    pub uv: (f64, f64),
}

fn surface_frame(
    surface: &SurfacePatch,
    c: &UnitSpeedCurve,
    s: f64,
    guess: (f64, f64),
) -> Result<(Point, Vector3<f64>, Vector3<f64>, Vector3<f64>, Vector3<f64>, (f64, f64))> {
    let g = c.metric();
    let j = c.jet(s)?;
    let (uv, dist) = surface.project(&j.point, guess)?;
    if dist > OFF_SURFACE_TOL {
        return Err(Error::CurveOffSurface { s, distance: dist });
    }
    let n = surface_normal(g, surface, uv.0, uv.1)?.v;
    let f = g.f_at(&j.point)?;
    let y = cross_with(f, &n, &j.tangent);
    Ok((j.point, j.tangent, y, n, j.accel, uv))
}

/// Darboux apparatus at `s` of a unit-speed curve lying on `surface`; `guess` seeds the
/// surface projection.
pub fn darboux_apparatus(
    surface: &SurfacePatch,
    c: &UnitSpeedCurve,
    s: f64,
    guess: (f64, f64),
) -> Result<DarbouxApparatus> {
    let g = c.metric();
    let (p, t, y, u, accel, uv) = surface_frame(surface, c, s, guess)?;
    let jet = g.jet(&p)?;
    if inner_with(jet.f, &t, &t).abs() < 1e-9 {
        return Err(Error::NullTangent { s });
    }
    let eps1 = c.eps1();
    let case_tag = if eps1 < 0.0 {
        CaseTag::TimelikeCase1
    } else {
        let (_, _, _, eps) = frenet_frame(c, s, KAPPA_MIN)?;
        CaseTag::from_signs(eps[0], eps[1]).expect("nonzero signs")
    };
    let acc = accel + connection_term(&jet, &t, &t);
    let delta = (1e-3f64).min(c.length() / 8.0);
    let dy = stencil_at(s, delta, c.length(), |x| Ok(surface_frame(surface, c, x, uv)?.2))?;
    let nabla_y = dy + connection_term(&jet, &t, &y);
    let kappa_g = inner_with(jet.f, &acc, &y);
    let kappa_n = inner_with(jet.f, &acc, &u);
    let tau_g = inner_with(jet.f, &nabla_y, &u);
    Ok(DarbouxApparatus {
        s,
        t: Tangent::new(p, t),
        y: Tangent::new(p, y),
        u: Tangent::new(p, u),
        kappa_g,
        kappa_n,
        tau_g,
        theta: theta_from_scalars(case_tag, kappa_g, kappa_n).ok(),
        case_tag,
        uv,
    })
}

pub fn recover_theta(app: &DarbouxApparatus) -> Result<f64> {
    theta_from_scalars(app.case_tag, app.kappa_g, app.kappa_n)
}

/// Frame samples (with measured structure) for a sequence of apparatus values.
pub fn apparatus_samples(apps: &[DarbouxApparatus]) -> Vec<FrameSample> {
    apps.iter()
        .map(|a| FrameSample {
            s: a.s,
            point: a.t.base,
            e: [a.t.v, a.y.v, a.u.v],
            structure: a.case_tag.structure(a.kappa_g, a.kappa_n, a.tau_g),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{reparametrize_by_arclength, AnalyticCurve, Curve};
    use approx::assert_abs_diff_eq;

    #[test]
    fn null_plane_is_not_timelike() {
        let g = WalkerMetric::flat();
        let s = SurfacePatch::parse("u", "v", "0").unwrap();
        assert!(matches!(surface_normal(&g, &s, 0.1, 0.2), Err(Error::NotTimelikeSurface { .. })));
    }

    #[test]
    fn xz_plane_normal() {
        let g = WalkerMetric::flat();
        let s = SurfacePatch::parse("u", "0", "v").unwrap();
        let n = surface_normal(&g, &s, 0.3, -0.4).unwrap();
        assert_eq!(n.v, Vector3::new(0.0, -1.0, 0.0));
        assert_abs_diff_eq!(g.metric_value(&n, &n).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn degenerate_patch() {
        let g = WalkerMetric::flat();
        let s = SurfacePatch::parse("u + v", "0", "u + v").unwrap();
        assert!(matches!(surface_normal(&g, &s, 0.0, 0.0), Err(Error::DegeneratePatch { .. })));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_from_scalars(CaseTag::TimelikeCase1, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(theta_from_scalars(CaseTag::SpacelikeCase2i, 0.0, 1.5).unwrap(), 0.0);
        assert_abs_diff_eq!(
            theta_from_scalars(CaseTag::TimelikeCase1, 0.0, -1.0).unwrap(),
            std::f64::consts::FRAC_PI_2
        );
        assert!(matches!(theta_from_scalars(CaseTag::SpacelikeCase2i, 2.0, 1.0), Err(Error::HyperbolicDomain { .. })));
        assert_eq!(theta_from_scalars(CaseTag::SpacelikeCase2ii, 0.0, 0.0), Err(Error::AngleUndefined));
    }

    #[test]
    fn unsupported_kinds() {
        assert!(check_supported(CaseTag::SpacelikeCase2i, CurveKind::Asymptotic).is_err());
        assert!(check_supported(CaseTag::SpacelikeCase2ii, CurveKind::Geodesic).is_err());
        for case in CaseTag::ALL {
            assert!(check_supported(case, CurveKind::PrincipalLine).is_ok());
        }
    }

    #[test]
    fn rotation_round_trip() {
        let n = Vector3::new(0.3, -1.0, 0.2);
        let b = Vector3::new(1.1, 0.4, -0.7);
        for case in CaseTag::ALL {
            let (y, u) = darboux_from_frenet(case, 0.37, n, b);
            let (n2, b2) = frenet_from_darboux(case, 0.37, y, u);
            assert!((n2 - n).amax() < 1e-14 && (b2 - b).amax() < 1e-14);
        }
    }

    /// Circle of radius r in the spacelike plane spanned by ∂y and (∂x + ∂z)/√2, on the
    /// timelike cylinder over it. The circle is a geodesic of the cylinder.
    #[test]
    fn cylinder_circle_is_a_geodesic() {
        let g = WalkerMetric::flat();
        let surf = SurfacePatch::parse("(2*cos(u) + v)/sqrt(2)", "2*sin(u)", "(2*cos(u) - v)/sqrt(2)").unwrap();
        let c = Curve::Analytic(
            AnalyticCurve::parse("2*cos(t)/sqrt(2)", "2*sin(t)", "2*cos(t)/sqrt(2)", 0.0, 3.0).unwrap(),
        );
        let unit = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        let mut guess = (0.0, 0.0);
        for k in 0..=10 {
            let s = unit.length() * k as f64 / 10.0;
            let app = darboux_apparatus(&surf, &unit, s, guess).unwrap();
            guess = app.uv;
            assert_abs_diff_eq!(app.kappa_g, 0.0, epsilon = 1e-6);
            assert_abs_diff_eq!(app.kappa_n.abs(), 0.5, epsilon = 1e-9);
            assert_eq!(app.case_tag, CaseTag::SpacelikeCase2i);
            assert_abs_diff_eq!(g.metric_value(&app.u, &app.u).unwrap(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(g.metric_value(&app.y, &app.y).unwrap(), -1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn off_surface_curve_is_rejected() {
        let g = WalkerMetric::flat();
        let surf = SurfacePatch::parse("u", "0", "v").unwrap();
        let c = Curve::Analytic(AnalyticCurve::parse("0", "t", "t", 0.0, 1.0).unwrap());
        let unit = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        assert!(matches!(darboux_apparatus(&surf, &unit, 0.5, (0.0, 0.0)), Err(Error::CurveOffSurface { .. })));
    }
}

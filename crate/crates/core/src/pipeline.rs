//! End-to-end runs driven by a [`RunConfig`].

use serde::Serialize;

use crate::breadth::closed_form::{
    asymptotic_m23_closed_form, geodesic_m23_closed_form, initial_data, spacelike_asymptotic_m23_closed_form, Family,
};
use crate::breadth::{
    build_partner, integrate_coefficients, verify_pair, BreadthCoefficients, CurvePair, Forcing, HMode, PairReport,
};
use crate::config::{PairSpec, RunConfig, Subcase};
use crate::curve::reparametrize_by_arclength;
use crate::darboux::{
    darboux_apparatus, darboux_initial_frame, frenet_from_darboux, integrate_darboux, CaseTag, CurveKind,
    DarbouxProfile,
};
use crate::error::{Error, Result};
use crate::frenet::{frenet_apparatus, FrameSolution};
use crate::metric::WalkerMetric;

/// One row of frame output; fields a run cannot produce are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameRow {
    pub s: f64,
    pub point: [f64; 3],
    pub t: [f64; 3],
    pub n: [f64; 3],
    pub b: [f64; 3],
    pub kappa: f64,
    pub tau: f64,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_g: f64,
    pub theta: f64,
}

fn arr(v: &nalgebra::Vector3<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn grid(length: f64, step: f64) -> Vec<f64> {
    let n = (length / step).round().max(4.0) as usize;
    (0..=n).map(|i| length * i as f64 / n as f64).collect()
}

/// Frenet data of the configured curve (plus Darboux data if a surface is given), or the
/// frames of the configured profile.
pub fn run_frames(cfg: &RunConfig) -> Result<Vec<FrameRow>> {
    let g = cfg.metric()?;
    let num = &cfg.numerics;
    if let Some(spec) = &cfg.curve {
        let curve = reparametrize_by_arclength(&g, &spec.build()?, num.null_tolerance)?;
        let surface = cfg.surface.as_ref().map(|s| s.build()).transpose()?;
        let mut guess = cfg.surface.as_ref().map(|s| (s.guess[0], s.guess[1])).unwrap_or((0.0, 0.0));
        let mut rows = Vec::new();
        for s in grid(curve.length(), num.step) {
            let fa = frenet_apparatus(&curve, s, num.kappa_min)?;
            let mut row = FrameRow {
                s,
                point: fa.t.base.into(),
                t: arr(&fa.t.v),
                n: arr(&fa.n.v),
                b: arr(&fa.b.v),
                kappa: fa.kappa,
                tau: fa.tau,
                kappa_g: f64::NAN,
                kappa_n: f64::NAN,
                tau_g: f64::NAN,
                theta: f64::NAN,
            };
            if let Some(surface) = &surface {
                let da = darboux_apparatus(surface, &curve, s, guess)?;
                guess = da.uv;
                row.kappa_g = da.kappa_g;
                row.kappa_n = da.kappa_n;
                row.tau_g = da.tau_g;
                row.theta = da.theta.unwrap_or(f64::NAN);
            }
            rows.push(row);
        }
        return Ok(rows);
    }
    let spec = cfg.profile.as_ref().ok_or_else(|| Error::Config("frames need a curve or a profile".into()))?;
    let profile = spec.build(num.length)?;
    let frames = profile_frames(&g, cfg, &profile)?;
    frames
        .samples
        .iter()
        .map(|smp| {
            let theta = profile.theta(smp.s)?;
            let (n, b) = frenet_from_darboux(profile.case(), theta, smp.e[1], smp.e[2]);
            let [kg, kn, tg] = profile.scalars(smp.s)?;
            Ok(FrameRow {
                s: smp.s,
                point: smp.point.into(),
                t: arr(&smp.e[0]),
                n: arr(&n),
                b: arr(&b),
                kappa: profile.kappa(smp.s)?,
                tau: profile.tau(smp.s)?,
                kappa_g: kg,
                kappa_n: kn,
                tau_g: tg,
                theta,
            })
        })
        .collect()
}

fn profile_frames(g: &WalkerMetric, cfg: &RunConfig, profile: &DarbouxProfile) -> Result<FrameSolution> {
    let frame0 = darboux_initial_frame(g, &cfg.start.point, profile.case(), cfg.start.phi, cfg.start.eta)?;
    integrate_darboux(g, profile, cfg.start.point, frame0, cfg.numerics.step)
}

/// Initial coefficients and forcing implied by the `pair` section.
pub fn pair_initial_data(spec: &PairSpec, profile: &DarbouxProfile) -> Result<([f64; 3], Forcing)> {
    let (case, kind) = (profile.case(), profile.kind());
    let default_mode = match spec.subcase {
        Subcase::M1Zero => HMode::HoldM1,
        Subcase::M1Nonzero if case == CaseTag::SpacelikeCase2i => HMode::MinusTwoM1Prime,
        Subcase::M1Nonzero => HMode::Zero,
    };
    let forcing = Forcing::from_mode(spec.h_mode.as_ref().unwrap_or(&default_mode))?;
    if let Some(m0) = spec.m0 {
        return Ok((m0, forcing));
    }
    let k = &spec.constants;
    let m0 = match spec.subcase {
        Subcase::M1Zero => {
            let (m2, m3) = match (case, kind) {
                (CaseTag::TimelikeCase1, CurveKind::Geodesic) => geodesic_m23_closed_form(k.b1, k.b2, 0.0),
                (CaseTag::TimelikeCase1, CurveKind::Asymptotic) => asymptotic_m23_closed_form(k.b1, k.b2, 0.0),
                (CaseTag::SpacelikeCase2ii, CurveKind::Asymptotic) => {
                    spacelike_asymptotic_m23_closed_form(k.b1, k.b2, 0.0)
                }
                _ => (k.c2, k.c3),
            };
            [0.0, m2, m3]
        }
        Subcase::M1Nonzero => {
            let family = Family::of(case, kind)
                .map_err(|_| Error::Config(format!("{case} {kind} has no closed form; give m0 explicitly")))?;
            let c = match k.c0 {
                Some(c) => c,
                None => family.ratio(profile, 0.0)?,
            };
            initial_data(case, kind, c, [k.a1, k.a2, k.a3], family.variable(profile, 0.0)?)?
        }
    };
    Ok((m0, forcing))
}

#[derive(Debug, Clone)]
pub struct PairRun {
    pub profile: DarbouxProfile,
    pub frames: FrameSolution,
    pub coeffs: BreadthCoefficients,
    pub pair: CurvePair,
    pub report: PairReport,
}

pub fn run_pair(cfg: &RunConfig) -> Result<PairRun> {
    let spec = cfg.pair.as_ref().ok_or_else(|| Error::Config("missing `pair` section".into()))?;
    let pspec = cfg.profile.as_ref().ok_or_else(|| Error::Config("missing `profile` section".into()))?;
    let profile = pspec.build(cfg.numerics.length)?;
    let (m0, forcing) = pair_initial_data(spec, &profile)?;
    let coeffs = integrate_coefficients(&profile, &forcing, m0, cfg.numerics.step)?;
    finish_pair(cfg, profile, coeffs)
}

/// Rebuilds the pair for given coefficients (for example read back from CSV) and verifies it.
pub fn verify_coefficients(cfg: &RunConfig, coeffs: BreadthCoefficients) -> Result<PairRun> {
    let pspec = cfg.profile.as_ref().ok_or_else(|| Error::Config("missing `profile` section".into()))?;
    let profile = pspec.build(cfg.numerics.length)?;
    if coeffs.case != profile.case() {
        return Err(Error::Config(format!(
            "coefficients are for {} but the profile is {}",
            coeffs.case,
            profile.case()
        )));
    }
    finish_pair(cfg, profile, coeffs)
}

fn finish_pair(cfg: &RunConfig, profile: DarbouxProfile, coeffs: BreadthCoefficients) -> Result<PairRun> {
    let g = cfg.metric()?;
    let frames = profile_frames(&g, cfg, &profile)?;
    let translation = cfg.pair.as_ref().map(|p| p.constants.c).unwrap_or(0.0);
    let pair = build_partner(&frames, &coeffs, translation)?;
    let report = verify_pair(&g, &pair, Some(&profile))?;
    Ok(PairRun { profile, frames, coeffs, pair, report })
}

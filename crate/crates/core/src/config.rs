//! JSON run configuration.
//!
//! ```json
//! {
//!   "f": "y*z",
//!   "numerics": { "step": 0.001, "length": 1.0 },
//!   "profile": { "case": "timelike", "kind": "geodesic", "kappa": "1", "tau": "0.5" },
//!   "start": { "point": [0, 0, 0], "phi": 0.1, "eta": 0.0 },
//!   "pair": { "subcase": "m1_zero", "constants": { "b1": 0.2, "b2": 0.1 } }
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::breadth::suite::SuiteConfig;
use crate::breadth::HMode;
use crate::curve::{AnalyticCurve, Curve, DerivativeScheme, SampledCurve};
use crate::darboux::{CaseTag, CurveKind, DarbouxProfile, SurfacePatch};
use crate::error::{Error, Result};
use crate::expr::Formula;
use crate::metric::{Point, WalkerMetric};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `f(y, z)`.
    pub f: String,
    /// Only `1` is accepted.
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub curve: Option<CurveSpec>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    #[serde(default)]
    pub start: StartSpec,
    #[serde(default)]
    pub pair: Option<PairSpec>,
    #[serde(default)]
    pub sweep: Option<SuiteConfig>,
    /// Coefficient CSV read by `verify`, relative to the working directory.
    #[serde(default)]
    pub coefficients: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub step: f64,
    /// Arc length of manufactured curves.
    pub length: f64,
    pub null_tolerance: f64,
    pub kappa_min: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { step: 1e-3, length: 1.0, null_tolerance: 1e-9, kappa_min: crate::frenet::KAPPA_MIN }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSpec {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Analytic {
        x: String,
        y: String,
        z: String,
        #[serde(default)]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
        #[serde(default)]
        derivatives: Option<DerivativeSpec>,
    },
    Sampled {
        #[serde(default)]
        t0: f64,
        dt: f64,
        points: Vec<Point>,
    },
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve> {
        match self {
            CurveSpec::Analytic { x, y, z, t0, t1, derivatives } => {
                let mut c = AnalyticCurve::parse(x, y, z, *t0, *t1)?;
                if *derivatives == Some(DerivativeSpec::FiniteDifference) {
                    c = c.with_scheme(DerivativeScheme::FiniteDifference(1e-5));
                }
                Ok(Curve::Analytic(c))
            }
            CurveSpec::Sampled { t0, dt, points } => Ok(Curve::Sampled(SampledCurve::new(*t0, *dt, points.clone())?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub x: String,
    pub y: String,
    pub z: String,
    /// Surface parameters near the curve's start.
    #[serde(default)]
    pub guess: [f64; 2],
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<SurfacePatch> {
        SurfacePatch::parse(&self.x, &self.y, &self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub case: CaseTag,
    pub kind: CurveKind,
    pub kappa: String,
    pub tau: String,
    /// Required for `general` curves.
    #[serde(default)]
    pub theta: Option<String>,
    #[serde(default)]
    pub theta0: f64,
}

impl ProfileSpec {
    pub fn build(&self, length: f64) -> Result<DarbouxProfile> {
        DarbouxProfile::parse(self.case, self.kind, &self.kappa, &self.tau, self.theta.as_deref(), self.theta0, length)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StartSpec {
    pub point: Point,
    /// Rotation and boost applied to the reference frame at `point`.
    pub phi: f64,
    pub eta: f64,
}

impl Default for StartSpec {
    fn default() -> Self {
        StartSpec { point: Point::new(0.0, 0.0, 0.0), phi: 0.0, eta: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    M1Nonzero,
    M1Zero,
}

/// Named constants of the closed-form families; unused ones may be omitted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    /// Helix ratio; taken from the profile at `s = 0` when absent.
    pub c0: Option<f64>,
    pub c2: f64,
    pub c3: f64,
    /// Translation constant in `s* = c + ∫(h - 1) ds`.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub subcase: Subcase,
    #[serde(default)]
    pub constants: Constants,
    /// Explicit initial `(m1, m2, m3)`; overrides the constants.
    #[serde(default)]
    pub m0: Option<[f64; 3]>,
    /// Defaults to `hold_m1` for `m1_zero` and to the case's conserving forcing otherwise.
    #[serde(default)]
    pub h_mode: Option<HMode>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Checks the signature and that every expression parses.
    pub fn validate(&self) -> Result<()> {
        if self.epsilon != 1.0 {
            return Err(Error::Config(format!("epsilon must be 1, got {}", self.epsilon)));
        }
        let n = &self.numerics;
        if !(n.step > 0.0 && n.length > 0.0 && n.null_tolerance >= 0.0 && n.kappa_min >= 0.0) {
            return Err(Error::Config("numerics must be positive".into()));
        }
        self.metric()?;
        if let Some(c) = &self.curve {
            c.build()?;
        }
        if let Some(s) = &self.surface {
            s.build()?;
        }
        if let Some(p) = &self.profile {
            p.build(n.length)?;
        }
        if let Some(PairSpec { h_mode: Some(HMode::Explicit(text)), .. }) = &self.pair {
            Formula::parse(text, &["s"])?;
        }
        if self.pair.is_some() && self.profile.is_none() {
            return Err(Error::Config("a pair needs a profile".into()));
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<WalkerMetric> {
        Ok(WalkerMetric::parse(&self.f)?)
    }

    /// Every expression in the configuration with its variables, for parse checks.
    pub fn expressions(&self) -> Vec<(String, String, Vec<&'static str>)> {
        let mut out = vec![("f".to_string(), self.f.clone(), vec!["y", "z"])];
        if let Some(CurveSpec::Analytic { x, y, z, .. }) = &self.curve {
            for (k, v) in [("curve.x", x), ("curve.y", y), ("curve.z", z)] {
                out.push((k.to_string(), v.clone(), vec!["t"]));
            }
        }
        if let Some(s) = &self.surface {
            for (k, v) in [("surface.x", &s.x), ("surface.y", &s.y), ("surface.z", &s.z)] {
                out.push((k.to_string(), v.clone(), vec!["u", "v"]));
            }
        }
        if let Some(p) = &self.profile {
            out.push(("profile.kappa".into(), p.kappa.clone(), vec!["s"]));
            out.push(("profile.tau".into(), p.tau.clone(), vec!["s"]));
            if let Some(t) = &p.theta {
                out.push(("profile.theta".into(), t.clone(), vec!["s"]));
            }
        }
        if let Some(PairSpec { h_mode: Some(HMode::Explicit(text)), .. }) = &self.pair {
            out.push(("pair.h_mode.explicit".into(), text.clone(), vec!["s"]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = RunConfig::from_json(r#"{"f": "y*z"}"#).unwrap();
        assert_eq!(cfg.numerics.step, 1e-3);
        assert!(cfg.pair.is_none());
    }

    #[test]
    fn rejects_negative_signature_and_unknown_keys() {
        assert!(matches!(RunConfig::from_json(r#"{"f": "0", "epsilon": -1}"#), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"f": "0", "colour": 1}"#), Err(Error::Config(_))));
    }

    #[test]
    fn reports_parse_offsets() {
        match RunConfig::from_json(r#"{"f": "y*"}"#) {
            Err(Error::Parse(e)) => assert_eq!(e.offset(), 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::from_json(r#"{"f": "x + y"}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"{
            "f": "y*z",
            "curve": {"kind": "sampled", "dt": 0.1, "points": [[0,0,0],[0,0.1,0],[0,0.2,0],[0,0.3,0]]},
            "surface": {"x": "u", "y": "0", "z": "v"},
            "profile": {"case": "spacelike_2i", "kind": "principal_line", "kappa": "1", "tau": "0.5"},
            "pair": {"subcase": "m1_nonzero", "constants": {"a1": 0.1}, "h_mode": {"explicit": "sin(s)"}},
            "sweep": {"samples": 3, "theorems": ["timelike-geodesic-constant-m1"]}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.expressions().len(), 7);
    }
}

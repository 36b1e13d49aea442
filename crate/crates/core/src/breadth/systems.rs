//! Coefficient systems for `β = α + m1 T + m2 Y + m3 U` with `T* = -T`.
//!
//! With `h = ds*/ds + 1` and Darboux scalars `(κg, κn, τg)`:
//!
//! ```text
//! timelike:  m1' = -m2 κg - m3 κn - h   m2' = -m1 κg + m3 τg   m3' = -m2 τg - m1 κn
//! spacelike: m1' =  m2 κg + m3 κn - h   m2' =  m1 κg - m3 τg   m3' = -m2 τg - m1 κn
//! ```

use serde::{Deserialize, Serialize};

use crate::darboux::{check_supported, CaseTag, CurveKind, DarbouxProfile};
use crate::error::{Error, Result};
use crate::expr::Formula;
use crate::ode::rk4_integrate;

/// Sign pattern `(σ1, σ2, σ3)` of `breadth = σ1 m1² + σ2 m2² + σ3 m3²`.
pub fn sign_pattern(case: CaseTag) -> [f64; 3] {
    match case {
        CaseTag::TimelikeCase1 => [-1.0, 1.0, 1.0],
        CaseTag::SpacelikeCase2i => [1.0, 1.0, -1.0],
        CaseTag::SpacelikeCase2ii => [1.0, -1.0, 1.0],
    }
}

pub fn breadth(signs: [f64; 3], m: [f64; 3]) -> f64 {
    signs[0] * m[0] * m[0] + signs[1] * m[1] * m[1] + signs[2] * m[2] * m[2]
}

/// Right-hand side of the coefficient system for one case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientRhs {
    pub case: CaseTag,
    pub kind: CurveKind,
}

pub fn coefficient_rhs(case: CaseTag, kind: CurveKind) -> Result<CoefficientRhs> {
    check_supported(case, kind)?;
    Ok(CoefficientRhs { case, kind })
}

impl CoefficientRhs {
    /// `m'` without the forcing term.
    pub fn unforced(&self, sc: [f64; 3], m: [f64; 3]) -> [f64; 3] {
        let [kg, kn, tg] = sc;
        let [m1, m2, m3] = m;
        match self.case {
            CaseTag::TimelikeCase1 => [-m2 * kg - m3 * kn, -m1 * kg + m3 * tg, -m2 * tg - m1 * kn],
            _ => [m2 * kg + m3 * kn, m1 * kg - m3 * tg, -m2 * tg - m1 * kn],
        }
    }

    pub fn eval(&self, sc: [f64; 3], m: [f64; 3], h: f64) -> [f64; 3] {
        let mut d = self.unforced(sc, m);
        d[0] -= h;
        d
    }
}

/// How `h(s)` is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HMode {
    Zero,
    /// `h = -2 m1'`, solved jointly with the first equation.
    MinusTwoM1Prime,
    /// `h` chosen so that `m1' = 0`.
    HoldM1,
    /// An expression in `s`.
    Explicit(String),
}

/// Resolved forcing.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Zero,
    MinusTwoM1Prime,
    HoldM1,
    Explicit(Formula),
}

impl Forcing {
    pub fn from_mode(mode: &HMode) -> Result<Forcing> {
        Ok(match mode {
            HMode::Zero => Forcing::Zero,
            HMode::MinusTwoM1Prime => Forcing::MinusTwoM1Prime,
            HMode::HoldM1 => Forcing::HoldM1,
            HMode::Explicit(text) => Forcing::Explicit(Formula::parse(text, &["s"])?),
        })
    }

    /// The forcing under which the case's breadth form is conserved for any data.
    pub fn conserving(case: CaseTag) -> Forcing {
        match case {
            CaseTag::SpacelikeCase2i => Forcing::MinusTwoM1Prime,
            _ => Forcing::Zero,
        }
    }

    /// `h` given the unforced first component `F1` at `s`.
    pub fn h(&self, s: f64, f1: f64) -> Result<f64> {
        match self {
            Forcing::Zero => Ok(0.0),
            Forcing::MinusTwoM1Prime => Ok(2.0 * f1),
            Forcing::HoldM1 => Ok(f1),
            Forcing::Explicit(f) => {
                f.eval(&[s]).map_err(|e| Error::ExpressionSingular { name: f.source().to_string(), at: s, reason: e.0 })
            }
        }
    }
}

/// Sampled `m1, m2, m3, h` on a uniform arc-length grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreadthCoefficients {
    pub case: CaseTag,
    pub s: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub m3: Vec<f64>,
    pub h: Vec<f64>,
    pub signs: [f64; 3],
    pub step: f64,
    /// Largest change between the step-`h` and step-`h/2` solutions at shared nodes.
    pub halving_change: f64,
}

impl BreadthCoefficients {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn m(&self, i: usize) -> [f64; 3] {
        [self.m1[i], self.m2[i], self.m3[i]]
    }

    pub fn breadth(&self, i: usize) -> f64 {
        breadth(self.signs, self.m(i))
    }

    pub fn breadth_column(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.breadth(i)).collect()
    }

    pub fn breadth_variation(&self) -> f64 {
        let b0 = self.breadth(0);
        (0..self.len()).map(|i| (self.breadth(i) - b0).abs()).fold(0.0, f64::max)
    }
}

pub const HALVING_LIMIT: f64 = 1e-4;

/// Integrates the coefficient system along `profile` from `m0` with RK4 at `step`, checking
/// against a half-step run.
pub fn integrate_coefficients(
    profile: &DarbouxProfile,
    forcing: &Forcing,
    m0: [f64; 3],
    step: f64,
) -> Result<BreadthCoefficients> {
    let rhs = coefficient_rhs(profile.case(), profile.kind())?;
    if profile.kind() != CurveKind::General && kappa_vanishes(profile)? {
        return Err(Error::UnsupportedCombination {
            case: profile.case().to_string(),
            kind: format!("{} with zero curvature", profile.kind()),
        });
    }
    if !(step > 0.0) {
        return Err(Error::Config(format!("step {step} must be positive")));
    }
    let s_max = profile.s_max();
    let n = (s_max / step).round().max(1.0) as usize;
    let h = s_max / n as f64;
    let field = |s: f64, m: &[f64; 3]| -> Result<[f64; 3]> {
        let sc = profile.scalars(s)?;
        let free = rhs.unforced(sc, *m);
        Ok(rhs.eval(sc, *m, forcing.h(s, free[0])?))
    };
    let coarse = rk4_integrate(field, 0.0, m0, h, n)?;
    let fine = rk4_integrate(field, 0.0, m0, 0.5 * h, 2 * n)?;
    let change = coarse
        .iter()
        .enumerate()
        .map(|(i, m)| (0..3).map(|k| (m[k] - fine[2 * i][k]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    if change > HALVING_LIMIT {
        return Err(Error::StepTooLarge { change });
    }
    let mut out = BreadthCoefficients {
        case: profile.case(),
        s: Vec::with_capacity(n + 1),
        m1: Vec::with_capacity(n + 1),
        m2: Vec::with_capacity(n + 1),
        m3: Vec::with_capacity(n + 1),
        h: Vec::with_capacity(n + 1),
        signs: sign_pattern(profile.case()),
        step: h,
        halving_change: change,
    };
    for (i, m) in coarse.iter().enumerate() {
        let s = i as f64 * h;
        let sc = profile.scalars(s)?;
        out.s.push(s);
        out.m1.push(m[0]);
        out.m2.push(m[1]);
        out.m3.push(m[2]);
        out.h.push(forcing.h(s, rhs.unforced(sc, *m)[0])?);
    }
    Ok(out)
}

fn kappa_vanishes(profile: &DarbouxProfile) -> Result<bool> {
    let n = 16;
    for i in 0..=n {
        if profile.kappa(profile.s_max() * i as f64 / n as f64)? != 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn profile(case: CaseTag, kind: CurveKind, kappa: &str, tau: &str, s_max: f64) -> DarbouxProfile {
        DarbouxProfile::parse(case, kind, kappa, tau, None, 0.0, s_max).unwrap()
    }

    #[test]
    fn timelike_geodesic_with_unit_curvature() {
        // m1' = m3, m3' = m1: from (0, 0, 1) the solution is (sinh s, 0, cosh s)
        let p = profile(CaseTag::TimelikeCase1, CurveKind::Geodesic, "1", "0", 2.0);
        let c = integrate_coefficients(&p, &Forcing::Zero, [0.0, 0.0, 1.0], 1e-3).unwrap();
        for i in (0..c.len()).step_by(250) {
            let s = c.s[i];
            assert_abs_diff_eq!(c.m1[i], s.sinh(), epsilon = 1e-11);
            assert_abs_diff_eq!(c.m2[i], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(c.m3[i], s.cosh(), epsilon = 1e-11);
        }
    }

    #[test]
    fn printed_geodesic_system() {
        let rhs = coefficient_rhs(CaseTag::TimelikeCase1, CurveKind::Geodesic).unwrap();
        let (k, t, h) = (1.3, -0.4, 0.2);
        let m = [0.3, -0.7, 1.1];
        let d = rhs.eval([0.0, -k, -t], m, h);
        assert_abs_diff_eq!(d[0], m[2] * k - h, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], -m[2] * t, epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], m[0] * k + m[1] * t, epsilon = 1e-15);
    }

    #[test]
    fn unsupported_pairs_and_zero_curvature() {
        assert!(matches!(
            coefficient_rhs(CaseTag::SpacelikeCase2i, CurveKind::Asymptotic),
            Err(Error::UnsupportedCombination { .. })
        ));
        let p = profile(CaseTag::TimelikeCase1, CurveKind::Asymptotic, "0", "1", 1.0);
        assert!(matches!(
            integrate_coefficients(&p, &Forcing::Zero, [0.0, 0.3, 0.2], 1e-3),
            Err(Error::UnsupportedCombination { .. })
        ));
    }

    #[test]
    fn zero_data_is_an_equilibrium() {
        let p = profile(CaseTag::SpacelikeCase2ii, CurveKind::Asymptotic, "1 + s", "2", 1.0);
        let c = integrate_coefficients(&p, &Forcing::Zero, [0.0; 3], 1e-3).unwrap();
        assert!(c.m1.iter().chain(&c.m2).chain(&c.m3).all(|&v| v == 0.0));
    }

    #[test]
    fn spacelike_asymptotic_conserves_breadth() {
        let p = profile(CaseTag::SpacelikeCase2ii, CurveKind::Asymptotic, "1 + 0.5*sin(3*s)", "0.7 - s", 1.0);
        let c = integrate_coefficients(&p, &Forcing::Zero, [0.4, -0.2, 0.9], 1e-3).unwrap();
        assert!(c.breadth_variation() < 1e-9);
    }

    #[test]
    fn halving_ratio_is_fourth_order() {
        let p = profile(CaseTag::TimelikeCase1, CurveKind::Geodesic, "2 + sin(5*s)", "1 + s^2", 1.0);
        let m0 = [0.3, 0.5, -0.2];
        let at_end = |step: f64| {
            let c =
                integrate_coefficients(&p, &Forcing::Explicit(Formula::parse("cos(3*s)", &["s"]).unwrap()), m0, step)
                    .unwrap();
            *c.m1.last().unwrap()
        };
        let reference = at_end(1e-4);
        let ratio = (at_end(0.02) - reference) / (at_end(0.01) - reference);
        assert!((ratio - 16.0).abs() < 0.3 * 16.0, "ratio {ratio}");
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn case() -> impl Strategy<Value = CaseTag> {
        prop::sample::select(CaseTag::ALL.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn conserving_forcing_keeps_breadth(
            case in case(),
            kappa in 0.3..1.5f64,
            wobble in 0.0..0.4f64,
            tau in -1.0..1.0f64,
            theta in -0.5..0.5f64,
            rate in -1.0..1.0f64,
            m0 in prop::array::uniform3(-1.0..1.0f64),
        ) {
            let k = format!("{kappa} + {wobble}*sin(3*s)");
            let th = format!("{theta} + {rate}*s");
            let profile = DarbouxProfile::parse(case, CurveKind::General, &k, &tau.to_string(), Some(&th), 0.0, 1.0).unwrap();
            let c = integrate_coefficients(&profile, &Forcing::conserving(case), m0, 1e-3).unwrap();
            prop_assert!(c.breadth_variation() <= 1e-8, "{}", c.breadth_variation());
        }
    }
}

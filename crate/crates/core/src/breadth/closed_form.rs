//! Closed-form solutions of the coefficient systems along helices.
//!
//! Along a curve with `τ = c κ` the system in `z = ∫κ ds` has constant coefficients and `m1`
//! solves `m1''' + k m1' = 0`. Principal lines use `θ` (timelike) or `w = ∫τ ds`
//! (spacelike, `θ = -w`) as the variable with `c = κ / τ`.

use nalgebra::{Matrix3, Vector3};

use super::systems::Forcing;
use crate::darboux::{CaseTag, CurveKind, DarbouxProfile};
use crate::error::{Error, Result};
use crate::expr::{Expr, Formula, Func};

/// Below this `|k|` the polynomial branch is used.
pub const POLY_BAND: f64 = 1e-9;
/// Between [`POLY_BAND`] and this `|k|` the branch is ambiguous.
pub const AMBIGUOUS_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    TimelikeGeodesic,
    TimelikeAsymptotic,
    TimelikePrincipal,
    SpacelikeGeodesic2i,
    SpacelikePrincipal2i,
    SpacelikeAsymptotic2ii,
}

impl Family {
    pub fn of(case: CaseTag, kind: CurveKind) -> Result<Family> {
        use CaseTag::*;
        use CurveKind::*;
        Ok(match (case, kind) {
            (TimelikeCase1, Geodesic) => Family::TimelikeGeodesic,
            (TimelikeCase1, Asymptotic) => Family::TimelikeAsymptotic,
            (TimelikeCase1, PrincipalLine) => Family::TimelikePrincipal,
            (SpacelikeCase2i, Geodesic) => Family::SpacelikeGeodesic2i,
            (SpacelikeCase2i, PrincipalLine) => Family::SpacelikePrincipal2i,
            (SpacelikeCase2ii, Asymptotic) => Family::SpacelikeAsymptotic2ii,
            _ => {
                return Err(Error::UnsupportedCombination {
                    case: case.to_string(),
                    kind: format!("{kind} (no closed form)"),
                })
            }
        })
    }

    pub fn is_principal(self) -> bool {
        matches!(self, Family::TimelikePrincipal | Family::SpacelikePrincipal2i)
    }

    /// `k` in `m1''' + k m1' = 0`.
    pub fn ode_coefficient(self, c: f64) -> f64 {
        match self {
            Family::TimelikeGeodesic | Family::TimelikeAsymptotic => c * c - 1.0,
            Family::TimelikePrincipal => 1.0 - c * c,
            _ => -(1.0 + c * c),
        }
    }

    /// Matrix `M(v)` of the reduced system `dm/dv = M(v) m`.
    pub fn reduced_matrix(self, c: f64, v: f64) -> Matrix3<f64> {
        let (sn, cs) = v.sin_cos();
        let (sh, ch) = (v.sinh(), v.cosh());
        match self {
            Family::TimelikeGeodesic => Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, -c, 1.0, c, 0.0),
            Family::TimelikeAsymptotic => Matrix3::new(0.0, -1.0, 0.0, -1.0, 0.0, -c, 0.0, c, 0.0),
            Family::TimelikePrincipal => Matrix3::new(0.0, -c * cs, c * sn, -c * cs, 0.0, 0.0, c * sn, 0.0, 0.0),
            Family::SpacelikeGeodesic2i => Matrix3::new(0.0, 0.0, -1.0, 0.0, 0.0, -c, -1.0, -c, 0.0),
            Family::SpacelikePrincipal2i => Matrix3::new(0.0, c * sh, -c * ch, -c * sh, 0.0, 0.0, -c * ch, 0.0, 0.0),
            Family::SpacelikeAsymptotic2ii => Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, c, 0.0, c, 0.0),
        }
    }

    /// Reduction variable at arc length `s`.
    pub fn variable(self, profile: &DarbouxProfile, s: f64) -> Result<f64> {
        match self {
            Family::TimelikePrincipal => profile.theta(s),
            Family::SpacelikePrincipal2i => profile.w(s),
            _ => profile.z(s),
        }
    }

    /// Helix ratio `c` at `s`: `τ/κ`, or `κ/τ` for principal lines.
    pub fn ratio(self, profile: &DarbouxProfile, s: f64) -> Result<f64> {
        let (k, t) = (profile.kappa(s)?, profile.tau(s)?);
        let (num, den) = if self.is_principal() { (k, t) } else { (t, k) };
        if den == 0.0 {
            return Err(Error::HypothesisUnsatisfiable(format!("helix ratio undefined at s = {s}")));
        }
        Ok(num / den)
    }
}

/// Forcing under which the closed forms hold.
pub fn closed_form_forcing(case: CaseTag) -> Forcing {
    Forcing::conserving(case)
}

fn num(x: f64) -> Expr {
    Expr::constant(x)
}

/// `m1` as a formula in the reduction variable `z`.
pub fn closed_form_m1_formula(case: CaseTag, kind: CurveKind, c: f64, a: [f64; 3]) -> Result<Formula> {
    let family = Family::of(case, kind)?;
    let z = Expr::Var(0);
    let k = family.ode_coefficient(c);
    let expr = if matches!(family, Family::TimelikeGeodesic | Family::TimelikeAsymptotic | Family::TimelikePrincipal) {
        if k.abs() <= POLY_BAND {
            Expr::add(
                Expr::add(Expr::mul(num(0.5 * a[0]), Expr::pow(z.clone(), num(2.0))), Expr::mul(num(a[1]), z)),
                num(a[2]),
            )
        } else if k.abs() < AMBIGUOUS_BAND {
            return Err(Error::BranchAmbiguous { discriminant: k });
        } else {
            let r = k.abs().sqrt();
            let arg = Expr::mul(num(r), z);
            let body = if k > 0.0 {
                Expr::sub(
                    Expr::mul(num(a[0]), Expr::call(Func::Sin, arg.clone())),
                    Expr::mul(num(a[1]), Expr::call(Func::Cos, arg)),
                )
            } else {
                Expr::add(
                    Expr::mul(num(a[0]), Expr::call(Func::Sinh, arg.clone())),
                    Expr::mul(num(a[1]), Expr::call(Func::Cosh, arg)),
                )
            };
            Expr::add(Expr::mul(num(1.0 / r), body), num(a[2]))
        }
    } else {
        let l = (-k).sqrt();
        let up = Expr::call(Func::Exp, Expr::mul(num(l), z.clone()));
        let down = Expr::call(Func::Exp, Expr::mul(num(-l), z));
        Expr::add(Expr::mul(num(1.0 / l), Expr::sub(Expr::mul(num(a[0]), up), Expr::mul(num(a[1]), down))), num(a[2]))
    };
    Ok(Formula::from_expr(expr, &["z"]))
}

pub fn closed_form_m1(case: CaseTag, kind: CurveKind, c: f64, a: [f64; 3], z: f64) -> Result<f64> {
    let f = closed_form_m1_formula(case, kind, c, a)?;
    f.eval(&[z]).map_err(|e| Error::ExpressionSingular { name: f.source().to_string(), at: z, reason: e.0 })
}

/// `(m2, m3)` as formulas in `z` for geodesic and asymptotic families; `None` for principal
/// lines, whose companions are integrals.
pub fn companions(case: CaseTag, kind: CurveKind, c: f64, a: [f64; 3]) -> Result<Option<(Formula, Formula)>> {
    let family = Family::of(case, kind)?;
    if family.is_principal() {
        return Ok(None);
    }
    if c == 0.0 {
        return Err(Error::HypothesisUnsatisfiable("companions need a non-planar helix".into()));
    }
    let m1 = closed_form_m1_formula(case, kind, c, a)?;
    let d1 = m1.expr().derivative(0);
    let d2 = d1.derivative(0);
    let rest = Expr::div(Expr::sub(d2, m1.expr().clone()), num(c));
    let (m2, m3) = match family {
        Family::TimelikeGeodesic => (rest, d1),
        Family::TimelikeAsymptotic => (Expr::neg(d1), rest),
        Family::SpacelikeGeodesic2i => (rest, Expr::neg(d1)),
        _ => (d1, rest),
    };
    Ok(Some((Formula::from_expr(m2, &["z"]), Formula::from_expr(m3, &["z"]))))
}

/// Constants `a` so that the closed form matches `m0` at reduction variable `v0`.
pub fn fit_constants(case: CaseTag, kind: CurveKind, c: f64, m0: [f64; 3], v0: f64) -> Result<[f64; 3]> {
    let family = Family::of(case, kind)?;
    let m = Vector3::from(m0);
    let (mat, dmat) = matrix_jet(family, c, v0);
    let first = mat * m;
    let second = (dmat + mat * mat) * m;
    let target = Vector3::new(m0[0], first[0], second[0]);
    let mut basis = Matrix3::zeros();
    for k in 0..3 {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        let f = closed_form_m1_formula(case, kind, c, a)?;
        let f1 = f.derivative_at(0);
        let f2 = f1.derivative_at(0);
        for (row, g) in [f, f1, f2].iter().enumerate() {
            basis[(row, k)] = g.eval(&[v0]).map_err(|e| Error::ExpressionSingular {
                name: g.source().to_string(),
                at: v0,
                reason: e.0,
            })?;
        }
    }
    let a = basis
        .lu()
        .solve(&target)
        .ok_or_else(|| Error::HypothesisUnsatisfiable("closed-form constants are not determined".into()))?;
    Ok([a[0], a[1], a[2]])
}

/// Initial coefficients at reduction variable `v0` reproducing the closed form with constants `a`.
pub fn initial_data(case: CaseTag, kind: CurveKind, c: f64, a: [f64; 3], v0: f64) -> Result<[f64; 3]> {
    let family = Family::of(case, kind)?;
    let f = closed_form_m1_formula(case, kind, c, a)?;
    let f1 = f.derivative_at(0);
    let f2 = f1.derivative_at(0);
    let mut jet = [0.0; 3];
    for (k, g) in [f, f1, f2].iter().enumerate() {
        jet[k] = g.eval(&[v0]).map_err(|e| Error::ExpressionSingular {
            name: g.source().to_string(),
            at: v0,
            reason: e.0,
        })?;
    }
    let (mat, dmat) = matrix_jet(family, c, v0);
    let second = dmat + mat * mat;
    // rows 0 of M and M' + M² give m1' and m1'' from (m1, m2, m3)
    let lhs = nalgebra::Matrix2::new(mat[(0, 1)], mat[(0, 2)], second[(0, 1)], second[(0, 2)]);
    let rhs = nalgebra::Vector2::new(jet[1] - mat[(0, 0)] * jet[0], jet[2] - second[(0, 0)] * jet[0]);
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::HypothesisUnsatisfiable("companions are not determined by the closed form".into()))?;
    Ok([jet[0], sol[0], sol[1]])
}

fn matrix_jet(family: Family, c: f64, v0: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let delta = 1e-3;
    let m = |v: f64| family.reduced_matrix(c, v);
    let d = (m(v0 - 2.0 * delta) - m(v0 - delta) * 8.0 + m(v0 + delta) * 8.0 - m(v0 + 2.0 * delta)) / (12.0 * delta);
    (m(v0), d)
}

/// `(m2, m3)` for `m1 ≡ 0` along a timelike geodesic, `Θ = ∫τ ds`; then `h = κ m3`.
pub fn geodesic_m23_closed_form(b1: f64, b2: f64, big_theta: f64) -> (f64, f64) {
    let (s, c) = big_theta.sin_cos();
    (-b1 * s + b2 * c, b1 * c + b2 * s)
}

/// `(m2, m3)` for `m1 ≡ 0` along a timelike asymptotic line, `Θ = ∫τ ds`; then `h = -κ m2`.
pub fn asymptotic_m23_closed_form(b1: f64, b2: f64, big_theta: f64) -> (f64, f64) {
    let (s, c) = big_theta.sin_cos();
    (-b1 * c - b2 * s, -b1 * s + b2 * c)
}

/// `(m2, m3)` for `m1 ≡ 0` along a spacelike asymptotic line with timelike `Y`,
/// `W = ∫τ ds`; then `h = κ m2`.
pub fn spacelike_asymptotic_m23_closed_form(b1: f64, b2: f64, big_w: f64) -> (f64, f64) {
    let (s, c) = (big_w.sinh(), big_w.cosh());
    (b1 * c + b2 * s, b1 * s + b2 * c)
}

//! The strict Walker metric `g = 2 dx dz + dy² + f(y, z) dz²` in the global chart.
//!
//! Coordinate components are indexed `0 = x`, `1 = y`, `2 = z`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ParseError;
use crate::field::{FieldJet, ScalarField2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn coords(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_coords(c: &Vector3<f64>) -> Self {
        Point::new(c[0], c[1], c[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Point {
    fn from(a: [f64; 3]) -> Self {
        Point::new(a[0], a[1], a[2])
    }
}

impl From<Point> for [f64; 3] {
    fn from(p: Point) -> Self {
        [p.x, p.y, p.z]
    }
}

/// A tangent vector in the coordinate basis `∂x, ∂y, ∂z` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent {
    pub base: Point,
    pub v: Vector3<f64>,
}

impl Tangent {
    pub fn new(base: Point, v: Vector3<f64>) -> Self {
        Tangent { base, v }
    }

    pub fn dx(base: Point) -> Self {
        Tangent::new(base, Vector3::x())
    }

    pub fn dy(base: Point) -> Self {
        Tangent::new(base, Vector3::y())
    }

    pub fn dz(base: Point) -> Self {
        Tangent::new(base, Vector3::z())
    }

    fn same_base(&self, other: &Tangent) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(Error::BasePointMismatch)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Null,
}

impl CausalCharacter {
    /// `+1` for spacelike, `-1` for timelike, `0` for null.
    pub fn sign(self) -> i8 {
        match self {
            CausalCharacter::Spacelike => 1,
            CausalCharacter::Timelike => -1,
            CausalCharacter::Null => 0,
        }
    }
}

/// Threshold below which `|g(u, u)|` counts as null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullTolerance {
    /// `rel · max(1, |2 u1 u3|, u2², |f u3²|)`.
    Scaled(f64),
    Absolute(f64),
}

impl Default for NullTolerance {
    fn default() -> Self {
        NullTolerance::Scaled(1e-9)
    }
}

/// Christoffel symbols `Γ^i_jk` at one point, zero-based indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelTable {
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl ChristoffelTable {
    pub fn from_jet(jet: &FieldJet) -> Self {
        let mut gamma = [[[0.0; 3]; 3]; 3];
        gamma[0][1][2] = 0.5 * jet.fy;
        gamma[0][2][1] = 0.5 * jet.fy;
        gamma[0][2][2] = 0.5 * jet.fz;
        gamma[1][2][2] = -0.5 * jet.fy;
        ChristoffelTable { gamma }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[i][j][k]
    }

    /// `Γ^i_jk a^j b^k`.
    pub fn contract(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
        let mut out = Vector3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i] += self.gamma[i][j][k] * a[j] * b[k];
                }
            }
        }
        out
    }
}

/// `Γ(a, b)` from the field jet without building the table.
pub fn connection_term(jet: &FieldJet, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * jet.fy * (a[1] * b[2] + a[2] * b[1]) + 0.5 * jet.fz * a[2] * b[2],
        -0.5 * jet.fy * a[2] * b[2],
        0.0,
    )
}

/// `g(a, b)` given the value of `f` at the common base point.
pub fn inner_with(f: f64, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a[0] * b[2] + a[2] * b[0] + a[1] * b[1] + f * a[2] * b[2]
}

/// The metric cross product, characterized by `g(a × b, w) = det(a, b, w)`.
pub fn cross_with(f: f64, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    let ca = a[0] * b[1] - a[1] * b[0];
    let cb = a[0] * b[2] - a[2] * b[0];
    let cc = a[1] * b[2] - a[2] * b[1];
    Vector3::new(ca - f * cc, -cb, cc)
}

pub fn metric_matrix_with(f: f64) -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, f)
}

pub fn inverse_matrix_with(f: f64) -> Matrix3<f64> {
    Matrix3::new(-f, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0)
}

/// `e1, e2, e3` with `g(e1,e1) = g(e2,e2) = 1`, `g(e3,e3) = -1`.
pub fn frame_with(f: f64) -> [Vector3<f64>; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [Vector3::y(), Vector3::new((2.0 - f) * 0.5 * r, 0.0, r), Vector3::new((2.0 + f) * 0.5 * r, 0.0, -r)]
}

pub fn causal_with(f: f64, u: &Vector3<f64>, tol: NullTolerance) -> CausalCharacter {
    let q = inner_with(f, u, u);
    let threshold = match tol {
        NullTolerance::Absolute(t) => t,
        NullTolerance::Scaled(rel) => {
            let scale = 1f64.max((2.0 * u[0] * u[2]).abs()).max(u[1] * u[1]).max((f * u[2] * u[2]).abs());
            rel * scale
        }
    };
    if q < -threshold {
        CausalCharacter::Timelike
    } else if q > threshold {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Null
    }
}

/// A strict Walker metric; the sign in front of `dy²` is fixed to `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerMetric {
    f: ScalarField2,
}

impl WalkerMetric {
    pub fn new(f: ScalarField2) -> Self {
        WalkerMetric { f }
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        Ok(WalkerMetric::new(ScalarField2::parse(text)?))
    }

    pub fn flat() -> Self {
        WalkerMetric::new(ScalarField2::flat())
    }

    pub fn field(&self) -> &ScalarField2 {
        &self.f
    }

    pub fn epsilon(&self) -> f64 {
        1.0
    }

    pub fn f_at(&self, p: &Point) -> Result<f64> {
        self.f.value(p.y, p.z)
    }

    pub fn jet(&self, p: &Point) -> Result<FieldJet> {
        self.f.jet(p.y, p.z)
    }

    pub fn matrix(&self, p: &Point) -> Result<Matrix3<f64>> {
        Ok(metric_matrix_with(self.f_at(p)?))
    }

    pub fn inverse(&self, p: &Point) -> Result<Matrix3<f64>> {
        Ok(inverse_matrix_with(self.f_at(p)?))
    }

    pub fn metric_value(&self, u: &Tangent, v: &Tangent) -> Result<f64> {
        u.same_base(v)?;
        Ok(inner_with(self.f_at(&u.base)?, &u.v, &v.v))
    }

    pub fn inner_at(&self, p: &Point, a: &Vector3<f64>, b: &Vector3<f64>) -> Result<f64> {
        Ok(inner_with(self.f_at(p)?, a, b))
    }

    pub fn christoffel(&self, p: &Point) -> Result<ChristoffelTable> {
        Ok(ChristoffelTable::from_jet(&self.jet(p)?))
    }

    pub fn cross(&self, u: &Tangent, v: &Tangent) -> Result<Tangent> {
        u.same_base(v)?;
        let f = self.f_at(&u.base)?;
        Ok(Tangent::new(u.base, cross_with(f, &u.v, &v.v)))
    }

    pub fn frame_e123(&self, p: &Point) -> Result<(Tangent, Tangent, Tangent)> {
        let [e1, e2, e3] = frame_with(self.f_at(p)?);
        Ok((Tangent::new(*p, e1), Tangent::new(*p, e2), Tangent::new(*p, e3)))
    }

    pub fn causal_character(&self, u: &Tangent, tol: NullTolerance) -> Result<CausalCharacter> {
        Ok(causal_with(self.f_at(&u.base)?, &u.v, tol))
    }

    /// `(∇_T V)^i = dV^i/ds + Γ^i_jk T^j V^k` at `point`.
    pub fn covariant_derivative_along(
        &self,
        point: &Point,
        velocity: &Tangent,
        field_value: &Tangent,
        field_derivative: &Tangent,
    ) -> Result<Tangent> {
        for t in [velocity, field_value, field_derivative] {
            if t.base != *point {
                return Err(Error::BasePointMismatch);
            }
        }
        let jet = self.jet(point)?;
        let v = field_derivative.v + connection_term(&jet, &velocity.v, &field_value.v);
        Ok(Tangent::new(*point, v))
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    const FIELDS: [&str; 5] = ["0", "y*z", "0.5*sin(y) + 0.2*z^2", "0.3*y^2 - 0.2*z", "exp(0.2*y)*cos(z)"];

    fn vector() -> impl Strategy<Value = Vector3<f64>> {
        prop::array::uniform3(-3.0..3.0f64).prop_map(Vector3::from)
    }

    proptest! {
        #[test]
        fn cross_product_pairs_with_determinant(f in -4.0..4.0f64, u in vector(), v in vector(), w in vector()) {
            let det = Matrix3::from_columns(&[u, v, w]).determinant();
            let scale = (1.0 + f.abs()) * u.norm() * v.norm() * w.norm();
            prop_assert!((inner_with(f, &cross_with(f, &u, &v), &w) - det).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn inverse_is_inverse(f in -1e3..1e3f64) {
            let id = inverse_matrix_with(f) * metric_matrix_with(f);
            prop_assert!((id - Matrix3::identity()).amax() <= 1e-12 * (1.0 + f.abs()));
        }

        #[test]
        fn frame_is_pseudo_orthonormal(f in -50.0..50.0f64) {
            let e = frame_with(f);
            let want = [1.0, 1.0, -1.0];
            for a in 0..3 {
                for b in 0..3 {
                    let target = if a == b { want[a] } else { 0.0 };
                    prop_assert!((inner_with(f, &e[a], &e[b]) - target).abs() <= 1e-12 * (1.0 + f.abs()));
                }
            }
        }

        /// `∂_k g_ij = g_lj Γ^l_ki + g_il Γ^l_kj` and `Γ^i_jk = Γ^i_kj`.
        #[test]
        fn connection_is_metric_and_symmetric(idx in 0..FIELDS.len(), y in -2.0..2.0f64, z in -2.0..2.0f64) {
            let g = WalkerMetric::parse(FIELDS[idx]).unwrap();
            let q = Point::new(0.0, y, z);
            let jet = g.jet(&q).unwrap();
            let gamma = ChristoffelTable::from_jet(&jet);
            let m = metric_matrix_with(jet.f);
            let df = [0.0, jet.fy, jet.fz];
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let lhs = if i == 2 && j == 2 { df[k] } else { 0.0 };
                        let rhs: f64 = (0..3).map(|l| m[(l, j)] * gamma.get(l, k, i) + m[(i, l)] * gamma.get(l, k, j)).sum();
                        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + jet.f.abs()));
                        prop_assert_eq!(gamma.get(i, j, k), gamma.get(i, k, j));
                    }
                }
            }
        }
    }
}

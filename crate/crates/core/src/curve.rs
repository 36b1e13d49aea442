//! Curves in the Walker chart and their unit-speed reparametrization.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::expr::Formula;
use crate::metric::{inner_with, Point, WalkerMetric};
use crate::ode::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeScheme {
    Exact,
    /// Five-point central differences with the given step.
    FiniteDifference(f64),
}

/// Position and first two parameter derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub point: Point,
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCurve {
    coords: [Formula; 3],
    first: [Formula; 3],
    second: [Formula; 3],
    t0: f64,
    t1: f64,
    scheme: DerivativeScheme,
}

impl AnalyticCurve {
    /// Coordinate expressions in the parameter `t` over `[t0, t1]`.
    pub fn parse(x: &str, y: &str, z: &str, t0: f64, t1: f64) -> Result<Self> {
        if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::Config(format!("curve parameter range [{t0}, {t1}] is empty")));
        }
        let coords = [Formula::parse(x, &["t"])?, Formula::parse(y, &["t"])?, Formula::parse(z, &["t"])?];
        let first = coords.clone().map(|c| c.derivative("t"));
        let second = first.clone().map(|c| c.derivative("t"));
        Ok(AnalyticCurve { coords, first, second, t0, t1, scheme: DerivativeScheme::Exact })
    }

    pub fn with_scheme(mut self, scheme: DerivativeScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    fn eval3(&self, fs: &[Formula; 3], t: f64) -> Result<Vector3<f64>> {
        let mut out = Vector3::zeros();
        for (i, f) in fs.iter().enumerate() {
            out[i] = f.eval(&[t]).map_err(|e| Error::ExpressionSingular {
                name: f.source().to_string(),
                at: t,
                reason: e.0,
            })?;
        }
        Ok(out)
    }

    fn jet(&self, t: f64) -> Result<CurveJet> {
        let c = self.eval3(&self.coords, t)?;
        let (d1, d2) = match self.scheme {
            DerivativeScheme::Exact => (self.eval3(&self.first, t)?, self.eval3(&self.second, t)?),
            DerivativeScheme::FiniteDifference(h) => {
                let m2 = self.eval3(&self.coords, t - 2.0 * h)?;
                let m1 = self.eval3(&self.coords, t - h)?;
                let p1 = self.eval3(&self.coords, t + h)?;
                let p2 = self.eval3(&self.coords, t + 2.0 * h)?;
                (
                    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
                    (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h),
                )
            }
        };
        Ok(CurveJet { point: Point::from_coords(&c), d1, d2 })
    }
}

/// Points on a uniform parameter grid `t0 + i·dt`, interpolated by local
/// Lagrange polynomials of degree up to four.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    t0: f64,
    dt: f64,
    points: Vec<Point>,
}

impl SampledCurve {
    pub fn new(t0: f64, dt: f64, points: Vec<Point>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::Config(format!("sampled curve needs at least 4 points, got {}", points.len())));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Config(format!("sample spacing {dt} must be positive")));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("sampled curve contains non-finite points".into()));
        }
        Ok(SampledCurve { t0, dt, points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    fn jet(&self, t: f64) -> CurveJet {
        let n = self.points.len();
        let width = n.min(5);
        let u = (t - self.t0) / self.dt;
        let center = u.round().clamp(0.0, (n - 1) as f64) as usize;
        let start = center.saturating_sub(width / 2).min(n - width);
        let nodes: Vec<f64> = (start..start + width).map(|i| i as f64).collect();
        let mut c = Vector3::zeros();
        let mut d1 = Vector3::zeros();
        let mut d2 = Vector3::zeros();
        for (j, &uj) in nodes.iter().enumerate() {
            let (l0, l1, l2) = lagrange_basis(&nodes, j, uj, u);
            let pj = self.points[start + j].coords();
            c += l0 * pj;
            d1 += l1 * pj;
            d2 += l2 * pj;
        }
        CurveJet { point: Point::from_coords(&c), d1: d1 / self.dt, d2: d2 / (self.dt * self.dt) }
    }
}

/// Value, first and second derivative of the `j`-th Lagrange basis polynomial at `u`.
fn lagrange_basis(nodes: &[f64], j: usize, uj: f64, u: f64) -> (f64, f64, f64) {
    // coefficients of prod_{m != j} (u - u_m) in increasing degree
    let mut poly = vec![1.0];
    let mut denom = 1.0;
    for (m, &um) in nodes.iter().enumerate() {
        if m == j {
            continue;
        }
        let mut next = vec![0.0; poly.len() + 1];
        for (k, &a) in poly.iter().enumerate() {
            next[k] -= um * a;
            next[k + 1] += a;
        }
        poly = next;
        denom *= uj - um;
    }
    let (mut v, mut d, mut dd) = (0.0, 0.0, 0.0);
    for &a in poly.iter().rev() {
        dd = dd * u + 2.0 * d;
        d = d * u + v;
        v = v * u + a;
    }
    (v / denom, d / denom, dd / denom)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Analytic(AnalyticCurve),
    Sampled(SampledCurve),
}

impl Curve {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Curve::Analytic(c) => (c.t0, c.t1),
            Curve::Sampled(c) => (c.t0, c.t0 + c.dt * (c.points.len() - 1) as f64),
        }
    }

    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        match self {
            Curve::Analytic(c) => c.jet(t),
            Curve::Sampled(c) => Ok(c.jet(t)),
        }
    }

    pub fn position(&self, t: f64) -> Result<Point> {
        Ok(self.jet(t)?.point)
    }
}

/// A curve reparametrized so that `|g(T, T)| = 1`, with `s ∈ [0, length]`.
#[derive(Debug, Clone)]
pub struct UnitSpeedCurve {
    curve: Curve,
    metric: WalkerMetric,
    eps1: f64,
    t_nodes: Vec<f64>,
    s_nodes: Vec<f64>,
}

/// Unit-speed data at one arc-length value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcJet {
    pub point: Point,
    /// `dc/ds`.
    pub tangent: Vector3<f64>,
    /// `d²c/ds²` in chart components (not the covariant acceleration).
    pub accel: Vector3<f64>,
}

const PANELS: usize = 512;

pub fn reparametrize_by_arclength(g: &WalkerMetric, c: &Curve, null_tol: f64) -> Result<UnitSpeedCurve> {
    let (t0, t1) = c.domain();
    let dt = (t1 - t0) / PANELS as f64;
    let mut sign = 0.0;
    let mut speed = |t: f64| -> Result<f64> {
        let j = c.jet(t)?;
        let q = inner_with(g.f_at(&j.point)?, &j.d1, &j.d1);
        if q.abs() < null_tol || (sign != 0.0 && q * sign <= 0.0) {
            return Err(Error::NullSegment { t, norm: q });
        }
        sign = q.signum();
        Ok(q.abs().sqrt())
    };
    let mut t_nodes = Vec::with_capacity(PANELS + 1);
    let mut s_nodes = Vec::with_capacity(PANELS + 1);
    t_nodes.push(t0);
    s_nodes.push(0.0);
    speed(t0)?;
    for i in 0..PANELS {
        let a = t0 + i as f64 * dt;
        let b = if i + 1 == PANELS { t1 } else { a + dt };
        speed(b)?;
        let len = gauss_legendre(&mut speed, a, b)?;
        t_nodes.push(b);
        s_nodes.push(s_nodes[i] + len);
    }
    Ok(UnitSpeedCurve { curve: c.clone(), metric: g.clone(), eps1: sign, t_nodes, s_nodes })
}

impl UnitSpeedCurve {
    pub fn length(&self) -> f64 {
        *self.s_nodes.last().expect("nonempty")
    }

    pub fn metric(&self) -> &WalkerMetric {
        &self.metric
    }

    /// Sign of `g(T, T)`.
    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    fn speed_at(&self, t: f64) -> Result<(CurveJet, f64)> {
        let j = self.curve.jet(t)?;
        let q = inner_with(self.metric.f_at(&j.point)?, &j.d1, &j.d1);
        Ok((j, (q * self.eps1).max(0.0).sqrt()))
    }

    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let s = s.clamp(0.0, self.length());
        let k = match self.s_nodes.partition_point(|&x| x <= s) {
            0 => 0,
            i => (i - 1).min(PANELS - 1),
        };
        let (ta, tb) = (self.t_nodes[k], self.t_nodes[k + 1]);
        let (sa, sb) = (self.s_nodes[k], self.s_nodes[k + 1]);
        let mut t = ta + (tb - ta) * (s - sa) / (sb - sa);
        let mut speed = |t: f64| Ok(self.speed_at(t)?.1);
        for _ in 0..50 {
            let resid = sa + gauss_legendre(&mut speed, ta, t)? - s;
            let sigma = speed(t)?;
            let step = resid / sigma;
            t = (t - step).clamp(ta, tb);
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(t)
    }

    pub fn jet(&self, s: f64) -> Result<ArcJet> {
        let t = self.t_of_s(s)?;
        let (j, sigma) = self.speed_at(t)?;
        let jet = self.metric.jet(&j.point)?;
        let (a, b) = (j.d1, j.d2);
        // derivative of g(c', c') along the parameter
        let dq = 2.0 * (b[0] * a[2] + a[0] * b[2])
            + 2.0 * a[1] * b[1]
            + (jet.fy * a[1] + jet.fz * a[2]) * a[2] * a[2]
            + 2.0 * jet.f * a[2] * b[2];
        let dsigma = self.eps1 * dq / (2.0 * sigma);
        Ok(ArcJet { point: j.point, tangent: a / sigma, accel: (b - a * (dsigma / sigma)) / (sigma * sigma) })
    }

    pub fn position(&self, s: f64) -> Result<Point> {
        Ok(self.jet(s)?.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn null_line_is_rejected() {
        let g = WalkerMetric::flat();
        let c = Curve::Analytic(AnalyticCurve::parse("t", "0", "0", 0.0, 1.0).unwrap());
        assert!(matches!(reparametrize_by_arclength(&g, &c, 1e-9), Err(Error::NullSegment { .. })));
    }

    #[test]
    fn constant_speed_line() {
        let g = WalkerMetric::flat();
        let c = Curve::Analytic(AnalyticCurve::parse("0", "2*t", "0", 0.0, 1.0).unwrap());
        let u = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        assert_abs_diff_eq!(u.length(), 2.0, epsilon = 1e-13);
        let j = u.jet(0.7).unwrap();
        assert_abs_diff_eq!(j.point.y, 0.7, epsilon = 1e-13);
        assert_abs_diff_eq!(j.tangent[1], 1.0, epsilon = 1e-13);
    }

    #[test]
    fn diagonal_line_has_sqrt_two_length() {
        let g = WalkerMetric::flat();
        let c = Curve::Analytic(AnalyticCurve::parse("t", "0", "t", 0.0, 3.0).unwrap());
        let u = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        assert_abs_diff_eq!(u.length(), 3.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(u.eps1(), 1.0);
    }

    #[test]
    fn unit_speed_in_curved_metric() {
        let g = WalkerMetric::parse("y*z + sin(z)").unwrap();
        let c = Curve::Analytic(AnalyticCurve::parse("t^2", "sin(t)", "1 + t/2", 0.0, 1.5).unwrap());
        let u = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        for k in 0..=20 {
            let s = u.length() * k as f64 / 20.0;
            let j = u.jet(s).unwrap();
            let q = g.inner_at(&j.point, &j.tangent, &j.tangent).unwrap();
            assert!((q.abs() - 1.0).abs() < 1e-8, "s = {s}: {q}");
        }
    }

    #[test]
    fn sampled_quartic_interpolation_is_exact_on_quartics() {
        let f = |t: f64| Point::new(t.powi(4), 1.0 - t, t * t);
        let pts: Vec<Point> = (0..11).map(|i| f(0.1 * i as f64)).collect();
        let c = SampledCurve::new(0.0, 0.1, pts).unwrap();
        let j = c.jet(0.537);
        assert_abs_diff_eq!(j.point.x, 0.537f64.powi(4), epsilon = 1e-13);
        assert_abs_diff_eq!(j.d1[0], 4.0 * 0.537f64.powi(3), epsilon = 1e-11);
        assert_abs_diff_eq!(j.d2[2], 2.0, epsilon = 1e-9);
    }
}

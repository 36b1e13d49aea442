//! Frenet apparatus of unit-speed curves and a generic moving-frame integrator.
//!
//! Sign conventions: `g(T,T) = ε1`, `g(N,N) = ε2`, `g(B,B) = ε3`, `ε1 ε2 ε3 = -1`, and
//!
//! ```text
//! ∇_T T =  ε2 κ N
//! ∇_T N = -ε1 κ T - ε3 τ B
//! ∇_T B =  ε2 τ N
//! ```
//!
//! with `κ ≥ 0` and the binormal oriented as `B = -ε1 (T × N)`.

use nalgebra::Vector3;

use crate::curve::UnitSpeedCurve;
use crate::error::{Error, Result};
use crate::metric::{connection_term, cross_with, frame_with, inner_with, Point, Tangent, WalkerMetric};
use crate::ode::rk4_step;

pub const KAPPA_MIN: f64 = 1e-7;
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Structure matrix `C`: `∇_T E_a = Σ_b C[a][b] E_b`.
pub type Structure = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSample {
    pub s: f64,
    pub point: Point,
    /// `E_0` is always the unit tangent.
    pub e: [Vector3<f64>; 3],
    pub structure: Structure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSolution {
    pub samples: Vec<FrameSample>,
    pub step: f64,
    pub signs: [f64; 3],
    /// Largest Gram–Schmidt correction applied over the run.
    pub max_correction: f64,
}

impl FrameSolution {
    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.point).collect()
    }
}

pub fn frenet_structure(signs: [f64; 3], kappa: f64, tau: f64) -> Structure {
    let [e1, e2, e3] = signs;
    [[0.0, e2 * kappa, 0.0], [-e1 * kappa, 0.0, -e3 * tau], [0.0, e2 * tau, 0.0]]
}

/// `e1, e2, e3` reassigned so that the timelike vector sits in the slot whose sign is `-1`,
/// then oriented so that `E_2 = -ε_0 (E_0 × E_1)`.
pub fn pseudo_orthonormal_frame(g: &WalkerMetric, p: &Point, signs: [f64; 3]) -> Result<[Vector3<f64>; 3]> {
    check_signs(signs)?;
    let f = g.f_at(p)?;
    let [e1, e2, e3] = frame_with(f);
    let mut spacelike = [e1, e2].into_iter();
    let mut out = [Vector3::zeros(); 3];
    for (slot, &sign) in signs.iter().enumerate() {
        out[slot] = if sign < 0.0 { e3 } else { spacelike.next().expect("two spacelike legs") };
    }
    let want = -signs[0] * cross_with(f, &out[0], &out[1]);
    if inner_with(f, &want, &out[2]) * signs[2] < 0.0 {
        out[2] = -out[2];
    }
    Ok(out)
}

/// Applies a rotation by `phi` in the spacelike pair and a boost by `eta` mixing the first
/// spacelike leg with the timelike one. Orientation is preserved.
pub fn lorentz_mix(frame: [Vector3<f64>; 3], signs: [f64; 3], phi: f64, eta: f64) -> [Vector3<f64>; 3] {
    let k = signs.iter().position(|&s| s < 0.0).expect("one timelike leg");
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut out = frame;
    let (c, s) = (phi.cos(), phi.sin());
    out[i] = c * frame[i] + s * frame[j];
    out[j] = -s * frame[i] + c * frame[j];
    let (ch, sh) = (eta.cosh(), eta.sinh());
    let (ei, ek) = (out[i], out[k]);
    out[i] = ch * ei + sh * ek;
    out[k] = sh * ei + ch * ek;
    out
}

fn check_signs(signs: [f64; 3]) -> Result<()> {
    let ok = signs.iter().all(|&s| s == 1.0 || s == -1.0) && signs.iter().filter(|&&s| s < 0.0).count() == 1;
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("frame signs {signs:?} must contain exactly one -1")))
    }
}

/// Checks `g(E_a, E_b) = signs[a] δ_ab` within `tol`.
pub fn check_frame(f: f64, e: &[Vector3<f64>; 3], signs: [f64; 3], tol: f64) -> Result<()> {
    for a in 0..3 {
        for b in a..3 {
            let want = if a == b { signs[a] } else { 0.0 };
            let got = inner_with(f, &e[a], &e[b]);
            if (got - want).abs() > tol {
                return Err(Error::Config(format!(
                    "initial frame is not pseudo-orthonormal: g(E{a}, E{b}) = {got}, expected {want}"
                )));
            }
        }
    }
    Ok(())
}

/// Sign-aware Gram–Schmidt at a point; returns the largest component change.
fn reorthonormalize(f: f64, e: &mut [Vector3<f64>; 3], signs: [f64; 3]) -> f64 {
    let before = *e;
    for a in 0..3 {
        let mut v = e[a];
        for b in 0..a {
            v -= e[b] * (inner_with(f, &v, &e[b]) * signs[b]);
        }
        let q = inner_with(f, &v, &v);
        e[a] = v / q.abs().sqrt();
    }
    (0..3).map(|a| (e[a] - before[a]).amax()).fold(0.0, f64::max)
}

/// Integrates `dp/ds = E_0`, `∇_{E_0} E_a = Σ_b C_ab(s) E_b` with RK4 and per-step
/// re-orthonormalization. Returns `n + 1` samples on `[0, s_max]`.
pub fn integrate_frame<F>(
    g: &WalkerMetric,
    mut structure: F,
    signs: [f64; 3],
    p0: Point,
    e0: [Vector3<f64>; 3],
    s_max: f64,
    step: f64,
) -> Result<FrameSolution>
where
    F: FnMut(f64) -> Result<Structure>,
{
    check_signs(signs)?;
    if !(step > 0.0) || !(s_max > 0.0) {
        return Err(Error::Config(format!("step {step} and length {s_max} must be positive")));
    }
    check_frame(g.f_at(&p0)?, &e0, signs, 1e-9)?;
    let n = (s_max / step).round().max(1.0) as usize;
    let h = s_max / n as f64;

    let pack = |p: &Point, e: &[Vector3<f64>; 3]| -> [f64; 12] {
        let mut y = [0.0; 12];
        y[..3].copy_from_slice(&[p.x, p.y, p.z]);
        for a in 0..3 {
            y[3 + 3 * a..6 + 3 * a].copy_from_slice(e[a].as_slice());
        }
        y
    };
    let unpack = |y: &[f64; 12]| -> (Point, [Vector3<f64>; 3]) {
        let e = [0, 1, 2].map(|a| Vector3::new(y[3 + 3 * a], y[4 + 3 * a], y[5 + 3 * a]));
        (Point::new(y[0], y[1], y[2]), e)
    };

    let mut samples = Vec::with_capacity(n + 1);
    samples.push(FrameSample { s: 0.0, point: p0, e: e0, structure: structure(0.0)? });
    let mut y = pack(&p0, &e0);
    let mut max_correction: f64 = 0.0;
    let mut rhs = |s: f64, y: &[f64; 12]| -> Result<[f64; 12]> {
        let (p, e) = unpack(y);
        let jet = g.jet(&p)?;
        let c = structure(s)?;
        let mut out = [0.0; 12];
        out[..3].copy_from_slice(e[0].as_slice());
        for a in 0..3 {
            let d = c[a][0] * e[0] + c[a][1] * e[1] + c[a][2] * e[2] - connection_term(&jet, &e[0], &e[a]);
            out[3 + 3 * a..6 + 3 * a].copy_from_slice(d.as_slice());
        }
        Ok(out)
    };
    for i in 0..n {
        let s = i as f64 * h;
        y = rk4_step(&mut rhs, s, &y, h)?;
        let (p, mut e) = unpack(&y);
        let f = g.f_at(&p)?;
        let correction = reorthonormalize(f, &mut e, signs);
        let s_next = (i + 1) as f64 * h;
        if correction > DRIFT_LIMIT {
            return Err(Error::FrameDriftExceeded { s: s_next, correction });
        }
        max_correction = max_correction.max(correction);
        y = pack(&p, &e);
        samples.push(FrameSample { s: s_next, point: p, e, structure: [[0.0; 3]; 3] });
    }
    for sample in samples.iter_mut().skip(1) {
        sample.structure = structure(sample.s)?;
    }
    Ok(FrameSolution { samples, step: h, signs, max_correction })
}

/// Manufactures a curve with prescribed curvature and torsion from an initial Frenet frame.
#[allow(clippy::too_many_arguments)]
pub fn integrate_curve_from_frenet_data<K, T>(
    g: &WalkerMetric,
    mut kappa: K,
    mut tau: T,
    signs: [f64; 3],
    p0: Point,
    frame0: [Vector3<f64>; 3],
    s_max: f64,
    step: f64,
) -> Result<FrameSolution>
where
    K: FnMut(f64) -> Result<f64>,
    T: FnMut(f64) -> Result<f64>,
{
    check_signs(signs)?;
    let f = g.f_at(&p0)?;
    let want = -signs[0] * cross_with(f, &frame0[0], &frame0[1]);
    if (want - frame0[2]).amax() > 1e-9 {
        return Err(Error::Config("initial binormal must equal -ε1 (T × N)".into()));
    }
    integrate_frame(g, |s| Ok(frenet_structure(signs, kappa(s)?, tau(s)?)), signs, p0, frame0, s_max, step)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetApparatus {
    pub s: f64,
    pub t: Tangent,
    pub n: Tangent,
    pub b: Tangent,
    pub kappa: f64,
    pub tau: f64,
    pub eps: [f64; 3],
}

/// `(T, N, B, κ, ε)` at `s` without torsion.
pub(crate) fn frenet_frame(
    c: &UnitSpeedCurve,
    s: f64,
    kappa_min: f64,
) -> Result<(Point, [Vector3<f64>; 3], f64, [f64; 3])> {
    let g = c.metric();
    let j = c.jet(s)?;
    let jet = g.jet(&j.point)?;
    let t = j.tangent;
    let acc = j.accel + connection_term(&jet, &t, &t);
    let q = inner_with(jet.f, &acc, &acc);
    let kappa = q.abs().sqrt();
    if kappa <= kappa_min {
        return Err(Error::DegenerateCurvature { s, kappa });
    }
    let e1 = c.eps1();
    let e2 = q.signum();
    let n = acc * (e2 / kappa);
    let b = -e1 * cross_with(jet.f, &t, &n);
    Ok((j.point, [t, n, b], kappa, [e1, e2, -e1 * e2]))
}

pub fn frenet_apparatus(c: &UnitSpeedCurve, s: f64, kappa_min: f64) -> Result<FrenetApparatus> {
    let g = c.metric();
    let (p, [t, n, b], kappa, eps) = frenet_frame(c, s, kappa_min)?;
    let delta = (1e-3f64).min(c.length() / 8.0);
    let db = stencil_at(s, delta, c.length(), |x| Ok(frenet_frame(c, x, kappa_min)?.1[2]))?;
    let jet = g.jet(&p)?;
    let nabla_b = db + connection_term(&jet, &t, &b);
    let tau = inner_with(jet.f, &nabla_b, &n) * eps[1] / inner_with(jet.f, &n, &n);
    Ok(FrenetApparatus { s, t: Tangent::new(p, t), n: Tangent::new(p, n), b: Tangent::new(p, b), kappa, tau, eps })
}

/// Five-point derivative weights for node `i` of `n` uniformly spaced nodes.
pub(crate) fn stencil_weights(i: usize, n: usize) -> (usize, [f64; 5]) {
    assert!(n >= 5, "stencils need at least five samples");
    match i {
        0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
        1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
        _ if i + 2 == n => (n - 5, [-1.0, 6.0, -18.0, 10.0, 3.0]),
        _ if i + 1 == n => (n - 5, [3.0, -16.0, 36.0, -48.0, 25.0]),
        _ => (i - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
    }
}

/// Derivative of sampled values at index `i` for spacing `h`.
pub fn sample_derivative(values: &[Vector3<f64>], i: usize, h: f64) -> Vector3<f64> {
    let (start, w) = stencil_weights(i, values.len());
    (0..5).map(|k| values[start + k] * w[k]).sum::<Vector3<f64>>() / (12.0 * h)
}

pub fn sample_derivative_scalar(values: &[f64], i: usize, h: f64) -> f64 {
    let (start, w) = stencil_weights(i, values.len());
    (0..5).map(|k| values[start + k] * w[k]).sum::<f64>() / (12.0 * h)
}

/// Derivative of `f` at `s` on `[0, len]` using a five-point stencil that stays in range.
pub(crate) fn stencil_at<F>(s: f64, delta: f64, len: f64, mut f: F) -> Result<Vector3<f64>>
where
    F: FnMut(f64) -> Result<Vector3<f64>>,
{
    let (origin, w) = if s - 2.0 * delta < 0.0 {
        (s, [-25.0, 48.0, -36.0, 16.0, -3.0])
    } else if s + 2.0 * delta > len {
        (s - 4.0 * delta, [3.0, -16.0, 36.0, -48.0, 25.0])
    } else {
        (s - 2.0 * delta, [1.0, -8.0, 0.0, 8.0, -1.0])
    };
    let mut acc = Vector3::zeros();
    for (k, wk) in w.iter().enumerate() {
        if *wk != 0.0 {
            acc += f(origin + k as f64 * delta)? * *wk;
        }
    }
    Ok(acc / (12.0 * delta))
}

/// Max coordinate-norm residual of `∇_T E_a - Σ_b C_ab E_b` for each `a`, over all samples.
pub fn frame_residuals(g: &WalkerMetric, samples: &[FrameSample], step: f64) -> Result<[f64; 3]> {
    if samples.len() < 5 {
        return Err(Error::GridMismatch("need at least five frame samples".into()));
    }
    let mut out = [0.0f64; 3];
    for a in 0..3 {
        let values: Vec<Vector3<f64>> = samples.iter().map(|s| s.e[a]).collect();
        for (i, sample) in samples.iter().enumerate() {
            let jet = g.jet(&sample.point)?;
            let nabla = sample_derivative(&values, i, step) + connection_term(&jet, &sample.e[0], &sample.e[a]);
            let c = sample.structure[a];
            let want = c[0] * sample.e[0] + c[1] * sample.e[1] + c[2] * sample.e[2];
            out[a] = out[a].max((nabla - want).norm());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{reparametrize_by_arclength, AnalyticCurve, Curve};
    use approx::assert_abs_diff_eq;

    #[test]
    fn flat_geodesic_is_a_straight_line() {
        let g = WalkerMetric::flat();
        let p0 = Point::new(0.2, -0.1, 0.4);
        let signs = [1.0, 1.0, -1.0];
        let e = pseudo_orthonormal_frame(&g, &p0, signs).unwrap();
        let sol = integrate_curve_from_frenet_data(&g, |_| Ok(0.0), |_| Ok(0.0), signs, p0, e, 1.0, 1e-2).unwrap();
        let last = sol.samples.last().unwrap();
        let want = p0.coords() + e[0];
        assert!((last.point.coords() - want).amax() < 1e-13);
    }

    #[test]
    fn curved_geodesic_has_no_acceleration() {
        let g = WalkerMetric::parse("y*y").unwrap();
        let p0 = Point::new(0.0, 0.5, 0.2);
        let signs = [-1.0, 1.0, 1.0];
        let e = lorentz_mix(pseudo_orthonormal_frame(&g, &p0, signs).unwrap(), signs, 0.4, 0.3);
        let sol = integrate_curve_from_frenet_data(&g, |_| Ok(0.0), |_| Ok(0.0), signs, p0, e, 1.0, 1e-3).unwrap();
        let r = frame_residuals(&g, &sol.samples, sol.step).unwrap();
        assert!(r[0] < 1e-6, "{r:?}");
    }

    #[test]
    fn flat_circle_closes() {
        let g = WalkerMetric::flat();
        let r = 0.5;
        let p0 = Point::new(0.0, 0.0, 0.0);
        let signs = [1.0, 1.0, -1.0];
        let e = pseudo_orthonormal_frame(&g, &p0, signs).unwrap();
        let len = 2.0 * std::f64::consts::PI * r;
        let sol = integrate_curve_from_frenet_data(&g, |_| Ok(1.0 / r), |_| Ok(0.0), signs, p0, e, len, 1e-3).unwrap();
        let last = sol.samples.last().unwrap();
        assert!((last.point.coords() - p0.coords()).norm() < 1e-4);
    }

    #[test]
    fn straight_line_is_degenerate() {
        let g = WalkerMetric::flat();
        let c = Curve::Analytic(AnalyticCurve::parse("0", "t", "0", 0.0, 1.0).unwrap());
        let u = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        assert!(matches!(frenet_apparatus(&u, 0.5, KAPPA_MIN), Err(Error::DegenerateCurvature { .. })));
    }

    #[test]
    fn flat_circle_in_spacelike_plane() {
        // y and (x + z)/√2 span a spacelike plane of the flat metric
        let g = WalkerMetric::flat();
        let r = 2.0;
        let c = Curve::Analytic(
            AnalyticCurve::parse("2*cos(t)/sqrt(2)", "2*sin(t)", "2*cos(t)/sqrt(2)", 0.0, 6.0).unwrap(),
        );
        let u = reparametrize_by_arclength(&g, &c, 1e-9).unwrap();
        for &s in &[0.0, 1.0, 5.5, u.length()] {
            let a = frenet_apparatus(&u, s, KAPPA_MIN).unwrap();
            assert_abs_diff_eq!(a.kappa, 1.0 / r, epsilon = 1e-9);
            assert_abs_diff_eq!(a.tau, 0.0, epsilon = 1e-7);
            assert_abs_diff_eq!(g.metric_value(&a.t, &a.n).unwrap(), 0.0, epsilon = 1e-8);
            assert_eq!(a.eps, [1.0, 1.0, -1.0]);
        }
    }
}

//! Assembly and verification of the partner curve `β = α + m1 T + m2 Y + m3 U`.

use nalgebra::Vector3;
use serde::Serialize;

use super::systems::BreadthCoefficients;
use crate::darboux::{CaseTag, DarbouxProfile};
use crate::error::{Error, Result};
use crate::frenet::{sample_derivative, sample_derivative_scalar, FrameSample, FrameSolution, KAPPA_MIN};
use crate::metric::{connection_term, inner_with, Point, WalkerMetric};

/// `1 - h` below this makes `β` singular.
pub const SINGULAR_SPEED: f64 = 1e-3;
pub const HELIX_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePair {
    pub case: CaseTag,
    pub alpha: Vec<FrameSample>,
    pub beta: Vec<Point>,
    /// Arc length of `β`, `s* = c + ∫(h - 1) ds`.
    pub s_star: Vec<f64>,
    pub coeffs: BreadthCoefficients,
    pub step: f64,
}

impl CurvePair {
    /// Offset `d = m1 T + m2 Y + m3 U` at sample `i`.
    pub fn offset(&self, i: usize) -> Vector3<f64> {
        let [m1, m2, m3] = self.coeffs.m(i);
        let e = &self.alpha[i].e;
        e[0] * m1 + e[1] * m2 + e[2] * m3
    }
}

/// Cumulative integral of uniformly sampled values with endpoint derivative correction
/// (fourth order).
pub fn cumulative_samples(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut trap = 0.0;
    out.push(0.0);
    let d0 = sample_derivative_scalar(values, 0, h);
    for i in 1..values.len() {
        trap += 0.5 * h * (values[i - 1] + values[i]);
        let di = sample_derivative_scalar(values, i, h);
        out.push(trap - h * h / 12.0 * (di - d0));
    }
    out
}

pub fn build_partner(frames: &FrameSolution, coeffs: &BreadthCoefficients, translation: f64) -> Result<CurvePair> {
    let n = frames.samples.len();
    if n != coeffs.len() {
        return Err(Error::GridMismatch(format!("{n} frame samples but {} coefficient samples", coeffs.len())));
    }
    if n < 5 {
        return Err(Error::GridMismatch("need at least five samples".into()));
    }
    if let Some(i) = (0..n).find(|&i| (frames.samples[i].s - coeffs.s[i]).abs() > 1e-12 * (1.0 + coeffs.s[i].abs())) {
        return Err(Error::GridMismatch(format!(
            "sample {i}: frame at s = {} but coefficients at s = {}",
            frames.samples[i].s, coeffs.s[i]
        )));
    }
    let mut pair = CurvePair {
        case: coeffs.case,
        alpha: frames.samples.clone(),
        beta: Vec::with_capacity(n),
        s_star: Vec::new(),
        coeffs: coeffs.clone(),
        step: frames.step,
    };
    for i in 0..n {
        let p = pair.alpha[i].point.coords() + pair.offset(i);
        pair.beta.push(Point::from_coords(&p));
    }
    let rate: Vec<f64> = coeffs.h.iter().map(|h| h - 1.0).collect();
    pair.s_star = cumulative_samples(&rate, frames.step).into_iter().map(|v| translation + v).collect();
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelixCheck {
    pub is_helix: bool,
    pub median_ratio: f64,
    pub deviation: f64,
}

/// `τ/κ` constant within [`HELIX_TOL`] relative to its median.
pub fn helix_check(kappa: &[f64], tau: &[f64]) -> Result<HelixCheck> {
    if kappa.len() != tau.len() || kappa.is_empty() {
        return Err(Error::GridMismatch(format!("{} curvatures but {} torsions", kappa.len(), tau.len())));
    }
    let mut ratios = Vec::with_capacity(kappa.len());
    for (i, (&k, &t)) in kappa.iter().zip(tau).enumerate() {
        if k.abs() <= KAPPA_MIN {
            return Err(Error::DegenerateCurvature { s: i as f64, kappa: k });
        }
        ratios.push(t / k);
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
    let deviation = ratios.iter().map(|r| (r - median).abs()).fold(0.0, f64::max);
    Ok(HelixCheck { is_helix: deviation <= HELIX_TOL * median.abs(), median_ratio: median, deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub breadth: f64,
    /// `max |breadth(s) - breadth(0)|` of the case's sign pattern.
    pub breadth_variation: f64,
    /// Same for `g(d, d)` measured with the frame vectors.
    pub metric_breadth_variation: f64,
    /// `max |T* + T|` with `dβ/ds = T + ∇_T d`.
    pub tangent_opposition: f64,
    /// `max |T* + T|` with the chart derivative of `β`.
    pub tangent_opposition_chart: f64,
    /// `max |s*_measured - (c - s)|` from the speed of `dβ/ds = T + ∇_T d`, when `h ≡ 0`.
    pub s_star_linearity: Option<f64>,
    /// Same with the chart velocity of `β` measured by the metric at `β`.
    pub s_star_linearity_chart: Option<f64>,
    pub helix: Option<HelixCheck>,
    pub h_max_abs: f64,
}

impl PairReport {
    /// Breadth conserved within `breadth_tol` and tangents opposed within `tangent_tol`.
    pub fn is_constant_breadth(&self, breadth_tol: f64, tangent_tol: f64) -> bool {
        self.breadth_variation <= breadth_tol && self.tangent_opposition <= tangent_tol
    }
}

pub fn verify_pair(g: &WalkerMetric, pair: &CurvePair, profile: Option<&DarbouxProfile>) -> Result<PairReport> {
    let n = pair.alpha.len();
    let h = pair.step;
    let coeffs = &pair.coeffs;
    let offsets: Vec<Vector3<f64>> = (0..n).map(|i| pair.offset(i)).collect();
    let betas: Vec<Vector3<f64>> = pair.beta.iter().map(Point::coords).collect();
    let mut report = PairReport {
        breadth: coeffs.breadth(0),
        breadth_variation: coeffs.breadth_variation(),
        metric_breadth_variation: 0.0,
        tangent_opposition: 0.0,
        tangent_opposition_chart: 0.0,
        s_star_linearity: None,
        s_star_linearity_chart: None,
        helix: None,
        h_max_abs: coeffs.h.iter().fold(0.0, |a, v| a.max(v.abs())),
    };
    let mut metric_b0 = None;
    for i in 0..n {
        let sample = &pair.alpha[i];
        let jet = g.jet(&sample.point)?;
        let t = sample.e[0];
        let b = inner_with(jet.f, &offsets[i], &offsets[i]);
        let b0 = *metric_b0.get_or_insert(b);
        report.metric_breadth_variation = report.metric_breadth_variation.max((b - b0).abs());

        let speed = coeffs.h[i] - 1.0;
        if speed.abs() < SINGULAR_SPEED || speed.signum() != (coeffs.h[0] - 1.0).signum() {
            return Err(Error::HypothesisUnsatisfiable(format!("partner is singular at s = {}", sample.s)));
        }
        let covariant = t + sample_derivative(&offsets, i, h) + connection_term(&jet, &t, &offsets[i]);
        report.tangent_opposition = report.tangent_opposition.max((covariant / speed + t).amax());
        let chart = sample_derivative(&betas, i, h);
        report.tangent_opposition_chart = report.tangent_opposition_chart.max((chart / speed + t).amax());
    }
    if report.h_max_abs <= 1e-12 {
        let mut covariant = Vec::with_capacity(n);
        let mut chart = Vec::with_capacity(n);
        for i in 0..n {
            let sample = &pair.alpha[i];
            let jet = g.jet(&sample.point)?;
            let t = sample.e[0];
            let v = t + sample_derivative(&offsets, i, h) + connection_term(&jet, &t, &offsets[i]);
            covariant.push(inner_with(jet.f, &v, &v).abs().sqrt());
            let w = sample_derivative(&betas, i, h);
            chart.push(inner_with(g.f_at(&pair.beta[i])?, &w, &w).abs().sqrt());
        }
        let deviation = |speeds: &[f64]| {
            let travelled = cumulative_samples(speeds, h);
            (0..n).map(|i| (travelled[i] - pair.alpha[i].s).abs()).fold(0.0, f64::max)
        };
        report.s_star_linearity = Some(deviation(&covariant));
        report.s_star_linearity_chart = Some(deviation(&chart));
    }
    if let Some(profile) = profile {
        let mut kappa = Vec::with_capacity(n);
        let mut tau = Vec::with_capacity(n);
        for sample in &pair.alpha {
            kappa.push(profile.kappa(sample.s)?);
            tau.push(profile.tau(sample.s)?);
        }
        report.helix = Some(helix_check(&kappa, &tau)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_is_fourth_order_exact_on_cubics() {
        let h = 0.01;
        let values: Vec<f64> = (0..=100).map(|i| (i as f64 * h).powi(3)).collect();
        let out = cumulative_samples(&values, h);
        for (i, v) in out.iter().enumerate() {
            let s = i as f64 * h;
            assert!((v - s.powi(4) / 4.0).abs() < 1e-13, "{s}: {v}");
        }
    }

    #[test]
    fn helix_detection() {
        let kappa = vec![1.0, 2.0, 0.5];
        let tau: Vec<f64> = kappa.iter().map(|k| 0.3 * k).collect();
        assert!(helix_check(&kappa, &tau).unwrap().is_helix);
        let s: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let ones = vec![1.0; s.len()];
        assert!(!helix_check(&ones, &s).unwrap().is_helix);
        assert!(helix_check(&ones, &vec![0.0; s.len()]).unwrap().is_helix);
    }
}

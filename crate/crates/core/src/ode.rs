//! Fixed-step classical Runge–Kutta and Gauss–Legendre quadrature.

use crate::error::Result;

/// One classical fourth-order step of `y' = rhs(s, y)`.
pub fn rk4_step<const N: usize, F>(rhs: &mut F, s: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k1 = rhs(s, y)?;
    let k2 = rhs(s + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = rhs(s + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = rhs(s + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Integrates `n` steps of size `h` from `s0`; returns `n + 1` states including `y0`.
pub fn rk4_integrate<const N: usize, F>(mut rhs: F, s0: f64, y0: [f64; N], h: f64, n: usize) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut out = Vec::with_capacity(n + 1);
    out.push(y0);
    let mut y = y0;
    for i in 0..n {
        y = rk4_step(&mut rhs, s0 + i as f64 * h, &y, h)?;
        out.push(y);
    }
    Ok(out)
}

const GL_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss–Legendre rule on `[a, b]` (exact for degree 9).
pub fn gauss_legendre<F>(f: &mut F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        sum += w * f(mid + half * x)?;
    }
    Ok(sum * half)
}

/// `I(s) = ∫_{s0}^{s} integrand` tabulated on uniform panels, evaluable anywhere in range.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    s0: f64,
    panel: f64,
    nodes: Vec<f64>,
}

impl CumulativeIntegral {
    pub fn build<F>(mut integrand: F, s0: f64, s1: f64, panel: f64) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let n = (((s1 - s0) / panel).ceil() as usize).max(1);
        let panel = (s1 - s0) / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = s0 + i as f64 * panel;
            acc += gauss_legendre(&mut integrand, a, a + panel)?;
            nodes.push(acc);
        }
        Ok(CumulativeIntegral { s0, panel, nodes })
    }

    pub fn at<F>(&self, integrand: &mut F, s: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let last = self.nodes.len() - 1;
        let k = (((s - self.s0) / self.panel).floor().max(0.0) as usize).min(last);
        let sk = self.s0 + k as f64 * self.panel;
        if (s - sk).abs() < 1e-15 * self.panel {
            return Ok(self.nodes[k]);
        }
        Ok(self.nodes[k] + gauss_legendre(integrand, sk, s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_stays_zero() {
        let out = rk4_integrate(|_, y: &[f64; 3]| Ok([y[2], -y[2], y[0] + y[1]]), 0.0, [0.0; 3], 0.01, 100).unwrap();
        assert!(out.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn fourth_order_convergence() {
        let run = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let out = rk4_integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [0.0, 1.0], h, n).unwrap();
            out[n][0]
        };
        let exact = 1f64.sin();
        let ratio = (run(0.1) - exact) / (run(0.05) - exact);
        assert!((ratio - 16.0).abs() < 0.3 * 16.0, "ratio {ratio}");
    }

    #[test]
    fn cumulative_integral_of_cosine() {
        let mut f = |s: f64| Ok(s.cos());
        let c = CumulativeIntegral::build(&mut f, 0.0, 3.0, 0.05).unwrap();
        for &s in &[0.0, 0.013, 1.0, 2.71, 3.0] {
            let v = c.at(&mut f, s).unwrap();
            assert!((v - s.sin()).abs() < 1e-14, "{s}: {v}");
        }
    }
}

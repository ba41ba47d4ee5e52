//! Composite Gauss–Legendre quadrature with adaptive bisection and a
//! principal-value rule for integrands with one simple pole.

use crate::error::{Error, Result};

/// Nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss–Legendre needs at least two points");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (m + h * x, h * w))
    }

    pub fn panel(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Refinement controls for [`Integrator`].
#[derive(Debug, Clone, Copy)]
pub struct Refinement {
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Disagreement beyond this relative level at the depth limit is an error.
    pub failure_rel: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            rel_tol: 1e-12,
            max_depth: 40,
            failure_rel: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Integrator {
    rule: GaussLegendre,
    refine: Refinement,
}

impl Integrator {
    pub fn new(points: usize) -> Self {
        Integrator {
            rule: GaussLegendre::new(points),
            refine: Refinement::default(),
        }
    }

    pub fn with_refinement(mut self, refine: Refinement) -> Self {
        self.refine = refine;
        self
    }

    /// ∫ f over consecutive breakpoints, each panel adaptively bisected.
    pub fn integrate_breaks(&self, f: &dyn Fn(f64) -> f64, breaks: &[f64]) -> Result<f64> {
        let coarse: Vec<f64> = breaks
            .windows(2)
            .map(|w| self.rule.panel(f, w[0], w[1]))
            .collect();
        let scale: f64 = coarse.iter().map(|v| v.abs()).sum();
        let abs_tol = self.refine.rel_tol * scale.max(f64::MIN_POSITIVE);
        let mut total = 0.0;
        for (w, whole) in breaks.windows(2).zip(coarse) {
            total += self.adapt(f, w[0], w[1], whole, abs_tol, scale, 0)?;
        }
        Ok(total)
    }

    pub fn integrate(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
        self.integrate_breaks(f, &[a, b])
    }

    #[allow(clippy::too_many_arguments)]
    fn adapt(
        &self,
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        abs_tol: f64,
        scale: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = self.rule.panel(f, a, m);
        let right = self.rule.panel(f, m, b);
        let fine = left + right;
        let diff = (fine - whole).abs();
        if !fine.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if diff <= abs_tol.max(self.refine.rel_tol * fine.abs()) {
            return Ok(fine);
        }
        if depth >= self.refine.max_depth || (b - a) <= 1e-14 * (a.abs() + b.abs()) {
            if diff > self.refine.failure_rel * scale.max(fine.abs()) {
                return Err(Error::Numerical(format!(
                    "quadrature did not converge on [{a:.6e}, {b:.6e}]: refinement disagreement {diff:.3e}"
                )));
            }
            return Ok(fine);
        }
        let l = self.adapt(f, a, m, left, abs_tol * 0.5, scale, depth + 1)?;
        let r = self.adapt(f, m, b, right, abs_tol * 0.5, scale, depth + 1)?;
        Ok(l + r)
    }

    /// P∫_a^b f(ν)/(ν − pole) dν.
    ///
    /// A window of half-width δ around the pole is folded onto
    /// ∫_0^δ [f(pole+u) − f(pole−u)]/u du, which is regular; the rest is
    /// integrated directly. Poles outside (a, b) fall back to plain quadrature.
    pub fn principal_value(
        &self,
        f: &dyn Fn(f64) -> f64,
        pole: f64,
        a: f64,
        b: f64,
        window: f64,
        extra_breaks: &[f64],
    ) -> Result<f64> {
        if !(pole > a && pole < b) {
            if pole == a || pole == b {
                return Err(Error::Domain(format!(
                    "pole {pole} on the integration boundary"
                )));
            }
            let g = |v: f64| f(v) / (v - pole);
            let breaks = geometric_breaks(
                a,
                b,
                if pole < a { a } else { b },
                (b - a) * 1e-3,
                extra_breaks,
            );
            return self.integrate_breaks(&g, &breaks);
        }
        let delta = window.min(0.5 * (pole - a)).min(0.5 * (b - pole));
        let folded = |u: f64| (f(pole + u) - f(pole - u)) / u;
        let inner = self.integrate(&folded, 0.0, delta)?;
        let g = |v: f64| f(v) / (v - pole);
        let lo_breaks = geometric_breaks(a, pole - delta, pole - delta, delta, extra_breaks);
        let hi_breaks = geometric_breaks(pole + delta, b, pole + delta, delta, extra_breaks);
        let lower = self.integrate_breaks(&g, &lo_breaks)?;
        let upper = self.integrate_breaks(&g, &hi_breaks)?;
        Ok(inner + lower + upper)
    }
}

/// Breakpoints in [a, b] whose spacing doubles away from `anchor`
/// (an endpoint), starting at `first`, with extra points merged in.
pub fn geometric_breaks(a: f64, b: f64, anchor: f64, first: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    let first = first.max((b - a) * 1e-9).min(b - a);
    let mut w = first;
    if anchor <= a {
        let mut x = a + w;
        while x < b {
            pts.push(x);
            w *= 2.0;
            x += w;
        }
    } else {
        let mut x = b - w;
        while x > a {
            pts.push(x);
            w *= 2.0;
            x -= w;
        }
    }
    pts.extend(extra.iter().copied().filter(|&e| e > a && e < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (x.abs() + y.abs() + 1e-300));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let v = gl.panel(&|x| x.powi(15) + 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(16) - 1.0) / 16.0 + (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-10 * exact);
        let w: f64 = GaussLegendre::new(64)
            .mapped(0.0, 1.0)
            .map(|(_, w)| w)
            .sum();
        assert!((w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_exponential() {
        let q = Integrator::new(16);
        let v = q
            .integrate_breaks(
                &|x: f64| (-x).exp(),
                &geometric_breaks(0.0, 200.0, 0.0, 0.1, &[]),
            )
            .unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn pv_constant_and_linear() {
        let q = Integrator::new(64);
        let (w, c0) = (4e4, 2.5);
        let v = q.principal_value(&|_| 1.0, c0, 0.0, w, 1e-2, &[]).unwrap();
        let exact = ((w - c0) / c0).ln();
        assert!((v - exact).abs() < 1e-10 * exact.abs());
        let v = q.principal_value(&|x| x, c0, 0.0, w, 1e-2, &[]).unwrap();
        let exact = w + c0 * ((w - c0) / c0).ln();
        assert!((v - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn pv_window_independence() {
        let q = Integrator::new(64);
        let f = |x: f64| (-(x - 5.0).powi(2)).exp();
        let a = q.principal_value(&f, 5.0, 0.0, 10.0, 0.4, &[]).unwrap();
        let b = q.principal_value(&f, 5.0, 0.0, 10.0, 0.2, &[]).unwrap();
        let c = q.principal_value(&f, 5.0, 0.0, 10.0, 0.1, &[]).unwrap();
        // even integrand about the pole on a symmetric interval: PV vanishes
        assert!(a.abs() < 1e-8 && (a - b).abs() < 1e-8 && (b - c).abs() < 1e-8);
    }

    #[test]
    fn pole_outside_is_direct() {
        let q = Integrator::new(32);
        let v = q
            .principal_value(&|_| 1.0, -1.0, 0.0, 1.0, 1e-2, &[])
            .unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-13);
        assert!(q
            .principal_value(&|_| 1.0, 0.0, 0.0, 1.0, 1e-2, &[])
            .is_err());
    }
}

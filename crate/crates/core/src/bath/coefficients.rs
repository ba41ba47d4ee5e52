use super::quadrature::Integrator;
use super::{occupation, LambIntegralParams, OhmicSpec, SpectralDensity};
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Real and imaginary parts of Γ(x) = ½γ(x) + iξ(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCoefficients {
    pub gamma: f64,
    pub xi: f64,
}

/// N1, N2 and the real principal-value parts c1, c2 of the Redfield
/// coefficients; the imaginary coefficients are C = i·c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RedfieldCoefficients {
    pub n1: f64,
    pub n2: f64,
    pub c1_imag: f64,
    pub c2_imag: f64,
}

/// Frequencies closer to zero than this use the x = 0 branches.
const ZERO_SNAP: f64 = 1e-12;

/// γ(x) = 4π n̄(x, β) J(x), with the limit 4π J′(0)/β at x = 0.
pub fn gamma(spectral: &SpectralDensity, beta: f64, x: f64) -> f64 {
    if x.abs() < ZERO_SNAP {
        4.0 * PI * spectral.slope_at_zero() / beta
    } else {
        4.0 * PI * occupation(x, beta) * spectral.eval(x)
    }
}

/// ξ(x) = −2 P∫_0^W J(ω)[(2n̄(ω)+1)x − ω]/(x² − ω²) dω.
pub fn xi(spectral: &SpectralDensity, beta: f64, x: f64, lamb: &LambIntegralParams) -> Result<f64> {
    let upper = spectral
        .support_limit()
        .map_or(lamb.w_cutoff, |s| s.min(lamb.w_cutoff));
    let q = Integrator::new(lamb.quadrature_points);
    let breaks = [1.0 / beta];
    if x.abs() < ZERO_SNAP {
        // G(0, ω) = J(ω)/ω
        let slope = spectral.slope_at_zero();
        let g = |w: f64| {
            if w == 0.0 {
                slope
            } else {
                spectral.eval(w) / w
            }
        };
        let v = q.integrate_breaks(
            &g,
            &super::quadrature::geometric_breaks(0.0, upper, 0.0, upper * 1e-4, &breaks),
        )?;
        return Ok(-2.0 * v);
    }
    // G = f(ω)/(ω − |x|) with f = −J(ω)[(2n̄+1)x − ω]/(ω + |x|)
    let ax = x.abs();
    let slope = spectral.slope_at_zero();
    let f = |w: f64| {
        let num = if w == 0.0 {
            2.0 * slope * x / beta
        } else {
            spectral.eval(w) * ((2.0 * occupation(w, beta) + 1.0) * x - w)
        };
        -num / (w + ax)
    };
    let v = q.principal_value(&f, ax, 0.0, upper, lamb.pv_window, &breaks)?;
    Ok(-2.0 * v)
}

pub fn gamma_xi(
    spectral: &SpectralDensity,
    beta: f64,
    x: f64,
    lamb: &LambIntegralParams,
) -> Result<CorrelationCoefficients> {
    Ok(CorrelationCoefficients {
        gamma: gamma(spectral, beta, x),
        xi: xi(spectral, beta, x, lamb)?,
    })
}

pub fn gamma_xi_ohmic(
    spec: &OhmicSpec,
    beta: f64,
    x: f64,
    lamb: &LambIntegralParams,
) -> Result<CorrelationCoefficients> {
    gamma_xi(&SpectralDensity::from(*spec), beta, x, lamb)
}

/// Cross coefficients between the σx and σy channels of one transition.
///
/// Both channels couple to the same field quadrature with a relative phase i,
/// so the emission and absorption halves of Γ_xy cancel and the result is
/// identically zero for any odd spectral density.
pub fn gamma_xi_cross(
    _spectral: &SpectralDensity,
    _beta: f64,
    _x: f64,
    _lamb: &LambIntegralParams,
) -> Result<CorrelationCoefficients> {
    Ok(CorrelationCoefficients {
        gamma: 0.0,
        xi: 0.0,
    })
}

/// −x²W + x³ln(W/x) for x > 0 and −x²W − x³ln(W/|x|) for x < 0.
pub fn vacuum_regularized(x: f64, w: f64) -> f64 {
    if x.abs() < ZERO_SNAP {
        0.0
    } else if x > 0.0 {
        -x * x * w + x * x * x * (w / x).ln()
    } else {
        -x * x * w - x * x * x * (w / x.abs()).ln()
    }
}

/// N1 = x³n̄, N2 = x³(n̄+1), c1 = (1/π)P∫_0^W ν³n̄/(x−ν)dν, c2 = c1 + (1/π)·vacuum.
pub fn redfield_coefficients(
    x: f64,
    beta: f64,
    lamb: &LambIntegralParams,
) -> Result<RedfieldCoefficients> {
    let (n1, n2) = if x.abs() < ZERO_SNAP {
        (0.0, 0.0)
    } else {
        let n = occupation(x, beta);
        let x3 = x * x * x;
        (x3 * n, x3 * (n + 1.0))
    };
    let c1 = thermal_pv(x, beta, lamb)?;
    let c2 = c1 + vacuum_regularized(x, lamb.w_cutoff) / PI;
    Ok(RedfieldCoefficients {
        n1,
        n2,
        c1_imag: c1,
        c2_imag: c2,
    })
}

fn thermal_pv(x: f64, beta: f64, lamb: &LambIntegralParams) -> Result<f64> {
    let upper = (800.0 / beta).min(lamb.w_cutoff);
    let q = Integrator::new(lamb.quadrature_points);
    let breaks = [1.0 / beta];
    // ν³n̄(ν) → ν²/β as ν → 0
    let g = |v: f64| {
        if v == 0.0 {
            0.0
        } else {
            v * v * v * occupation(v, beta)
        }
    };
    let v = if x > ZERO_SNAP && x < upper {
        let f = |v: f64| -g(v) / PI;
        q.principal_value(&f, x, 0.0, upper, lamb.pv_window, &breaks)?
    } else {
        let h = |v: f64| g(v) / (x - v) / PI;
        let b = super::quadrature::geometric_breaks(
            0.0,
            upper,
            0.0,
            (upper * 1e-4).min(0.01 / beta),
            &breaks,
        );
        q.integrate_breaks(&h, &b)?
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hot() -> SpectralDensity {
        SpectralDensity::Ohmic {
            j0: 4e-4,
            omega_cutoff: 2f64.sqrt(),
        }
    }

    fn cold() -> SpectralDensity {
        SpectralDensity::Ohmic {
            j0: 4e-3,
            omega_cutoff: 0.2f64.sqrt(),
        }
    }

    #[test]
    fn gamma_at_zero() {
        let g = gamma(&hot(), 4.0, 0.0);
        assert!((g - 4.0 * PI * 1e-4).abs() < 1e-15);
        assert!((g - 1.25664e-3).abs() < 1e-8);
    }

    #[test]
    fn detailed_balance() {
        for beta in [0.25, 1.0 / 30.0, 4.0] {
            for x in [0.5, 3.0] {
                let r = gamma(&hot(), beta, -x) / gamma(&hot(), beta, x);
                assert!((r / (beta * x).exp() - 1.0).abs() < 1e-9);
            }
        }
    }

    /// Brute-force ξ: subtract the pole analytically and integrate with
    /// composite Simpson on a fine uniform grid.
    fn xi_oracle(spectral: &SpectralDensity, beta: f64, x: f64, upper: f64, n: usize) -> f64 {
        let ax = x.abs();
        let f = |w: f64| {
            let num = if w == 0.0 {
                2.0 * spectral.slope_at_zero() * x / beta
            } else {
                spectral.eval(w) * ((2.0 * occupation(w, beta) + 1.0) * x - w)
            };
            -num / (w + ax)
        };
        let fa = f(ax);
        let h = upper / n as f64;
        let slope = (f(ax + 1e-5) - f(ax - 1e-5)) / 2e-5;
        let integrand = |w: f64| {
            if (w - ax).abs() < 1e-14 {
                slope
            } else {
                (f(w) - fa) / (w - ax)
            }
        };
        let mut s = integrand(0.0) + integrand(upper);
        for k in 1..n {
            let w = k as f64 * h;
            s += integrand(w) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let smooth = s * h / 3.0;
        -2.0 * (smooth + fa * ((upper - ax) / ax).ln())
    }

    #[test]
    fn xi_matches_subtraction_oracle() {
        let lamb = LambIntegralParams::default();
        for (spec, beta, x) in [
            (cold(), 0.25, 0.5),
            (cold(), 0.25, -0.5),
            (hot(), 1.0 / 30.0, 3.0),
            (hot(), 1.0 / 30.0, -3.0),
        ] {
            let upper = spec.support_limit().unwrap();
            let v = xi(&spec, beta, x, &lamb).unwrap();
            let o = xi_oracle(&spec, beta, x, upper, 400_000);
            assert!((v - o).abs() < 1e-7 * o.abs(), "x={x}: {v} vs {o}");
        }
    }

    #[test]
    fn xi_window_independence() {
        let base = LambIntegralParams::default();
        let a = xi(
            &cold(),
            0.25,
            0.5,
            &LambIntegralParams {
                pv_window: 0.04,
                ..base
            },
        )
        .unwrap();
        let b = xi(
            &cold(),
            0.25,
            0.5,
            &LambIntegralParams {
                pv_window: 0.01,
                ..base
            },
        )
        .unwrap();
        assert!((a - b).abs() < 1e-7 * a.abs());
    }

    #[test]
    fn xi_large_frequency_tail() {
        // Far above the cutoff G ≈ J(ω)(2n̄+1)/x, so ξ ≈ −(2/x)∫J(2n̄+1)dω.
        let lamb = LambIntegralParams::default();
        let spec = hot();
        let beta = 1.0 / 30.0;
        let wc = 2f64.sqrt();
        let x = 100.0 * wc;
        let v = xi(&spec, beta, x, &lamb).unwrap();
        let q = Integrator::new(64);
        let m0 = q
            .integrate(
                &|w: f64| {
                    if w == 0.0 {
                        2.0 * 4e-4 / beta
                    } else {
                        spec.eval(w) * (2.0 * occupation(w, beta) + 1.0)
                    }
                },
                0.0,
                40.0,
            )
            .unwrap();
        let lead = -2.0 * m0 / x;
        assert!((v - lead).abs() < 2e-3 * lead.abs(), "{v} vs {lead}");
        let near = xi(&spec, beta, wc, &lamb).unwrap();
        assert!(v.abs() < near.abs());
    }

    #[test]
    fn cross_coefficients_vanish() {
        let c = gamma_xi_cross(&cold(), 0.25, 0.5, &LambIntegralParams::default()).unwrap();
        assert_eq!(c.gamma, 0.0);
        assert_eq!(c.xi, 0.0);
    }

    #[test]
    fn redfield_n_identities() {
        let lamb = LambIntegralParams::default();
        let r = redfield_coefficients(0.0, 4.0, &lamb).unwrap();
        assert_eq!((r.n1, r.n2), (0.0, 0.0));
        for x in [-3.0, -0.5, 0.05, 0.5, 2.5] {
            let r = redfield_coefficients(x, 0.25, &lamb).unwrap();
            assert!((r.n2 - r.n1 - x * x * x).abs() < 1e-12 * (1.0 + x.abs().powi(3)));
        }
        // N1 → x²/β near zero: continuous, vanishing quadratically
        for x in [1e-6, -1e-6] {
            let r = redfield_coefficients(x, 0.25, &lamb).unwrap();
            assert!((r.n1 - x * x / 0.25).abs() < 1e-17);
            assert!(r.n1.abs() < 1e-11 && r.n2.abs() < 1e-11);
        }
    }

    /// Thermal part of c2 by pole subtraction and composite Simpson.
    fn c1_oracle(x: f64, beta: f64, upper: f64, n: usize) -> f64 {
        let g = |v: f64| {
            if v == 0.0 {
                0.0
            } else {
                v * v * v * occupation(v, beta)
            }
        };
        let gx = g(x);
        let h = upper / n as f64;
        let slope = (g(x + 1e-5) - g(x - 1e-5)) / 2e-5;
        let integrand = |v: f64| {
            if (v - x).abs() < 1e-14 {
                -slope
            } else {
                (g(v) - gx) / (x - v)
            }
        };
        let mut s = integrand(0.0) + integrand(upper);
        for k in 1..n {
            s += integrand(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        (s * h / 3.0 + gx * (x / (upper - x)).ln()) / PI
    }

    #[test]
    fn c2_matches_refinement_oracle() {
        let lamb = LambIntegralParams::default();
        let (x, beta) = (2.5, 4.0);
        let r = redfield_coefficients(x, beta, &lamb).unwrap();
        let upper = 200.0;
        let coarse = c1_oracle(x, beta, upper, 200_000) + vacuum_regularized(x, 4e4) / PI;
        let fine = c1_oracle(x, beta, upper, 400_000) + vacuum_regularized(x, 4e4) / PI;
        assert!((coarse - fine).abs() < 1e-6 * fine.abs());
        assert!(
            (r.c2_imag - fine).abs() < 1e-6 * fine.abs(),
            "{} vs {}",
            r.c2_imag,
            fine
        );
        let o = c1_oracle(x, beta, upper, 400_000);
        assert!((r.c1_imag - o).abs() < 1e-9, "{} vs {}", r.c1_imag, o);
    }

    #[test]
    fn negative_frequency_vacuum_branch() {
        let w = 4e4;
        let x = -0.5;
        assert!((vacuum_regularized(x, w) - (-0.25 * w + 0.125 * (w / 0.5).ln())).abs() < 1e-9);
        assert_eq!(vacuum_regularized(0.0, w), 0.0);
    }
}

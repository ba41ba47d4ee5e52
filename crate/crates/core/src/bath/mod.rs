//! Thermal baths: spectral densities, occupations and the one-sided Fourier
//! coefficients entering Lindblad and Redfield generators.

mod coefficients;
pub mod quadrature;

pub use coefficients::{
    gamma, gamma_xi, gamma_xi_cross, gamma_xi_ohmic, redfield_coefficients, vacuum_regularized, xi,
    CorrelationCoefficients, RedfieldCoefficients,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// J(x) = J0·x·e^{−x²/ωc²}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OhmicSpec {
    pub j0: f64,
    pub omega_cutoff: f64,
}

impl OhmicSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.j0 >= 0.0 && self.j0.is_finite()) {
            return Err(Error::Config(format!(
                "j0 must be non-negative, got {}",
                self.j0
            )));
        }
        if !(self.omega_cutoff > 0.0 && self.omega_cutoff.is_finite()) {
            return Err(Error::Config(format!(
                "omega_cutoff must be positive, got {}",
                self.omega_cutoff
            )));
        }
        Ok(())
    }
}

/// Odd spectral densities. `Cubic` (J = a·x³) is the free-field form implied by
/// a dipole coupling and is used to compare Lindblad and Redfield generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralDensity {
    Ohmic { j0: f64, omega_cutoff: f64 },
    Cubic { prefactor: f64 },
}

impl From<OhmicSpec> for SpectralDensity {
    fn from(s: OhmicSpec) -> Self {
        SpectralDensity::Ohmic {
            j0: s.j0,
            omega_cutoff: s.omega_cutoff,
        }
    }
}

impl SpectralDensity {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SpectralDensity::Ohmic { j0, omega_cutoff } => {
                spectral_density(&OhmicSpec { j0, omega_cutoff }, x)
            }
            SpectralDensity::Cubic { prefactor } => prefactor * x * x * x,
        }
    }

    /// dJ/dx at x = 0.
    pub fn slope_at_zero(&self) -> f64 {
        match *self {
            SpectralDensity::Ohmic { j0, .. } => j0,
            SpectralDensity::Cubic { .. } => 0.0,
        }
    }

    /// Frequency beyond which J is numerically zero (the Gaussian tail
    /// underflows), if any.
    pub fn support_limit(&self) -> Option<f64> {
        match *self {
            SpectralDensity::Ohmic { omega_cutoff, .. } => Some(omega_cutoff * 27.5),
            SpectralDensity::Cubic { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralDensity::Ohmic { j0, omega_cutoff } => {
                OhmicSpec { j0, omega_cutoff }.validate()
            }
            SpectralDensity::Cubic { prefactor } => {
                if prefactor >= 0.0 && prefactor.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "cubic prefactor must be non-negative, got {prefactor}"
                    )))
                }
            }
        }
    }
}

/// A thermal bath and the level pairs it couples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub name: String,
    pub beta: f64,
    pub spectral: SpectralDensity,
    pub transitions: Vec<(usize, usize)>,
    /// Transition dipoles for Redfield-type generators, one per transition;
    /// calibrated from the spectral density when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipoles: Option<Vec<f64>>,
}

impl BathSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!(
                "bath '{}': beta must be positive",
                self.name
            )));
        }
        self.spectral.validate()?;
        for (k, &(i, j)) in self.transitions.iter().enumerate() {
            if i >= dim || j >= dim || i == j {
                return Err(Error::Config(format!(
                    "bath '{}': invalid transition ({i}, {j}) for dimension {dim}",
                    self.name
                )));
            }
            for &(a, b) in &self.transitions[..k] {
                if (a, b) == (i, j) || (a, b) == (j, i) {
                    return Err(Error::Config(format!(
                        "bath '{}': transition ({i}, {j}) listed twice",
                        self.name
                    )));
                }
            }
        }
        if let Some(d) = &self.dipoles {
            if d.len() != self.transitions.len() {
                return Err(Error::Config(format!(
                    "bath '{}': {} dipoles for {} transitions",
                    self.name,
                    d.len(),
                    self.transitions.len()
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the principal-value integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambIntegralParams {
    /// Upper frequency cutoff W.
    pub w_cutoff: f64,
    pub quadrature_points: usize,
    pub pv_window: f64,
}

impl Default for LambIntegralParams {
    fn default() -> Self {
        LambIntegralParams {
            w_cutoff: 4e4,
            quadrature_points: 64,
            pv_window: 1e-2,
        }
    }
}

impl LambIntegralParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_cutoff > 0.0 && self.w_cutoff.is_finite()) {
            return Err(Error::Config("w_cutoff must be positive".into()));
        }
        if self.quadrature_points < 64 {
            return Err(Error::Config(
                "quadrature_points must be at least 64".into(),
            ));
        }
        if !(self.pv_window > 0.0 && self.pv_window < self.w_cutoff / 10.0) {
            return Err(Error::Config(
                "pv_window must lie in (0, w_cutoff/10)".into(),
            ));
        }
        Ok(())
    }
}

/// n̄(ω, β) = 1/(e^{βω} − 1).
pub fn thermal_occupation(omega: f64, beta: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::Domain(
            "thermal occupation is singular at ω = 0".into(),
        ));
    }
    Ok(occupation(omega, beta))
}

#[inline]
pub(crate) fn occupation(omega: f64, beta: f64) -> f64 {
    1.0 / (beta * omega).exp_m1()
}

pub fn spectral_density(spec: &OhmicSpec, x: f64) -> f64 {
    spec.j0 * x * (-(x * x) / (spec.omega_cutoff * spec.omega_cutoff)).exp()
}

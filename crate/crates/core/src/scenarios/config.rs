use crate::bath::{BathSpec, LambIntegralParams, SpectralDensity};
use crate::error::{Error, Result};
use crate::floquet::{Branch, DriveSpec, DrivenHamiltonian};
use crate::generators::{CouplingChannel, GeneratorKind, SecularMode};
use crate::operator::{diag, DensityMatrix, Operator, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Generator options of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodConfig {
    pub kind: GeneratorKind,
    pub lamb_shift: bool,
    pub secular: SecularMode,
    pub q_max: usize,
    pub fourier_floor: f64,
    pub gap_tol: f64,
    pub lamb_params: LambIntegralParams,
    pub branch: Branch,
    /// Floquet samples per period; chosen from the step size when absent.
    pub floquet_samples: Option<usize>,
    pub floquet_substeps: usize,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            kind: GeneratorKind::Lindblad,
            lamb_shift: true,
            secular: SecularMode::Partial,
            q_max: 24,
            fourier_floor: 1e-3,
            gap_tol: 1e-4,
            lamb_params: LambIntegralParams::default(),
            branch: Branch::Unfolded,
            floquet_samples: None,
            floquet_substeps: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// |k⟩⟨k|.
    Level { level: usize },
    /// Explicit matrix, row-major real and optional imaginary parts.
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Level { level: 0 }
    }
}

impl InitialState {
    pub fn build(&self, d: usize) -> Result<DensityMatrix> {
        match self {
            InitialState::Level { level } => DensityMatrix::pure(d, *level),
            InitialState::Matrix { re, im } => {
                let shape_ok = |m: &Vec<Vec<f64>>| m.len() == d && m.iter().all(|r| r.len() == d);
                if !shape_ok(re) || !im.as_ref().map_or(true, shape_ok) {
                    return Err(Error::Config(format!("initial state must be {d}×{d}")));
                }
                let op = Operator::from_fn(d, d, |i, j| {
                    C64::new(re[i][j], im.as_ref().map_or(0.0, |m| m[i][j]))
                });
                DensityMatrix::new(op)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub energies: Vec<f64>,
    pub target_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSpec>,
    pub baths: Vec<BathSpec>,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default)]
    pub initial_state: InitialState,
}

impl ScenarioConfig {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d < 2 {
            return Err(Error::Config("a scenario needs at least two levels".into()));
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Config("energies must be finite".into()));
        }
        if self.target_level >= d {
            return Err(Error::Config(format!(
                "target level {} out of range for {d} levels",
                self.target_level
            )));
        }
        if let Some(l) = &self.labels {
            if l.len() != d {
                return Err(Error::Config(format!("{} labels for {d} levels", l.len())));
            }
        }
        if let Some(dr) = &self.drive {
            dr.validate(d)?;
        }
        if self.method.kind.is_floquet() && self.drive.is_none() {
            return Err(Error::Config(format!(
                "method {} needs a drive",
                self.method.kind.name()
            )));
        }
        if !self.method.kind.is_floquet() && self.drive.is_some() {
            return Err(Error::Config(format!(
                "method {} describes an undriven system; drop the drive or use a Floquet method",
                self.method.kind.name()
            )));
        }
        if self.baths.is_empty() {
            return Err(Error::Config("at least one bath is required".into()));
        }
        for b in &self.baths {
            b.validate(d)?;
        }
        self.method.lamb_params.validate()?;
        if !(self.method.fourier_floor >= 0.0 && self.method.gap_tol > 0.0) {
            return Err(Error::Config(
                "fourier_floor must be non-negative and gap_tol positive".into(),
            ));
        }
        self.initial_state.build(d)?;
        Ok(())
    }

    pub fn h0(&self) -> Operator {
        diag(&self.energies)
    }

    pub fn hamiltonian(&self) -> DrivenHamiltonian {
        DrivenHamiltonian::new(self.h0(), self.drive)
    }

    pub fn label(&self, k: usize) -> String {
        self.labels
            .as_ref()
            .map_or_else(|| k.to_string(), |l| l[k].clone())
    }

    /// Coupling channels with dipoles calibrated per transition where absent.
    pub fn channels(&self) -> Result<Vec<CouplingChannel>> {
        let d = self.dim();
        self.baths
            .iter()
            .map(|b| {
                let ch = CouplingChannel::sigma_pairs(b, d)?;
                if ch.dipoles.is_some() {
                    return Ok(ch);
                }
                let dip = b
                    .transitions
                    .iter()
                    .map(|&(i, j)| {
                        qubit_dipole_calibration(
                            &b.spectral,
                            (self.energies[i] - self.energies[j]).abs(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ch.with_dipoles(dip))
            })
            .collect()
    }
}

/// μ10 = sqrt(6π²J(ω10)/ω10³), the dipole for which Redfield and Lindblad
/// relaxation rates of a qubit agree.
pub fn qubit_dipole_calibration(spectral: &SpectralDensity, omega10: f64) -> Result<f64> {
    if !(omega10 > 0.0 && omega10.is_finite()) {
        return Err(Error::Domain(format!(
            "calibration frequency must be positive, got {omega10}"
        )));
    }
    let j = spectral.eval(omega10);
    if j < 0.0 || !j.is_finite() {
        return Err(Error::Domain(format!(
            "spectral density J({omega10}) = {j} is negative"
        )));
    }
    Ok((6.0 * PI * PI * j / omega10.powi(3)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_formula() {
        let s = SpectralDensity::Ohmic {
            j0: 4e-3,
            omega_cutoff: 0.2f64.sqrt(),
        };
        let j = 4e-3 * 0.5 * (-1.25f64).exp();
        let mu = qubit_dipole_calibration(&s, 0.5).unwrap();
        assert!((mu - (6.0 * PI * PI * j / 0.125).sqrt()).abs() < 1e-15);
        let zero = SpectralDensity::Ohmic {
            j0: 0.0,
            omega_cutoff: 1.0,
        };
        assert_eq!(qubit_dipole_calibration(&zero, 0.5).unwrap(), 0.0);
        assert!(qubit_dipole_calibration(&s, 0.0).is_err());
    }

    #[test]
    fn initial_state_shapes() {
        assert!(InitialState::Matrix {
            re: vec![vec![1.0]],
            im: None
        }
        .build(2)
        .is_err());
        let r = InitialState::Matrix {
            re: vec![vec![0.5, 0.0], vec![0.0, 0.5]],
            im: None,
        }
        .build(2)
        .unwrap();
        assert!((r.population(1) - 0.5).abs() < 1e-15);
    }
}

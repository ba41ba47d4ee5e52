use crate::error::{Error, Result};
use crate::operator::{c, ket_bra, Operator};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// V(t) = μ cos(Ωt)(|i⟩⟨j| + |j⟩⟨i|).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub mu: f64,
    pub omega_drive: f64,
    pub pair: (usize, usize),
}

impl DriveSpec {
    pub fn tau(&self) -> f64 {
        2.0 * PI / self.omega_drive
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!(
                "drive mu must be non-negative, got {}",
                self.mu
            )));
        }
        if !(self.omega_drive > 0.0 && self.omega_drive.is_finite()) {
            return Err(Error::Config("drive omega_drive must be positive".into()));
        }
        let (i, j) = self.pair;
        if i == j || i >= dim || j >= dim {
            return Err(Error::Config(format!(
                "invalid drive pair ({i}, {j}) for dimension {dim}"
            )));
        }
        Ok(())
    }

    /// |i⟩⟨j| + |j⟩⟨i|.
    pub fn coupling(&self, dim: usize) -> Operator {
        let (i, j) = self.pair;
        ket_bra(dim, i, j) + ket_bra(dim, j, i)
    }
}

/// H_S(t) = H0 + V(t).
#[derive(Debug, Clone, PartialEq)]
pub struct DrivenHamiltonian {
    pub h0: Operator,
    pub drive: Option<DriveSpec>,
    coupling: Option<Operator>,
}

impl DrivenHamiltonian {
    pub fn new(h0: Operator, drive: Option<DriveSpec>) -> Self {
        let coupling = drive.map(|d| d.coupling(h0.nrows()));
        DrivenHamiltonian {
            h0,
            drive,
            coupling,
        }
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn at(&self, t: f64) -> Operator {
        match (&self.drive, &self.coupling) {
            (Some(d), Some(x)) => &self.h0 + x * c(d.mu * (d.omega_drive * t).cos()),
            _ => self.h0.clone(),
        }
    }
}

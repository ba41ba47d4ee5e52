use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Default validation thresholds. Override once per process with
/// [`set_tolerances`] before any computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub hermitian: f64,
    pub unitary: f64,
    pub density_trace: f64,
    pub density_hermitian: f64,
    /// Soft lower bound on the eigenvalues of a density matrix.
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-10,
            unitary: 1e-8,
            density_trace: 1e-10,
            density_hermitian: 1e-10,
            positivity: 1e-8,
        }
    }
}

static ACTIVE: OnceLock<Tolerances> = OnceLock::new();

pub fn tolerances() -> Tolerances {
    *ACTIVE.get_or_init(Tolerances::default)
}

pub fn set_tolerances(t: Tolerances) -> Result<()> {
    ACTIVE
        .set(t)
        .map_err(|_| Error::Config("tolerances already fixed for this process".into()))
}

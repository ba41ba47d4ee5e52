//! The four master-equation generators as superoperators.

mod coupling;
mod lindblad;
mod redfield;
pub mod superop;

pub use coupling::{coupling_decomposition, CouplingChannel, SigmaKind};
pub use lindblad::{
    floquet_lindblad_generator, lindblad_generator, lindblad_generator_interaction,
};
pub use redfield::{floquet_redfield_generator, redfield_generator, REDFIELD_PREFACTOR};

use crate::bath::LambIntegralParams;
use crate::error::{Error, Result};
use crate::floquet::{DrivenHamiltonian, FloquetDecomposition};
use crate::operator::{c, Operator};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use superop::{apply, hamiltonian_part, unvectorize, vectorize, SuperOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Lindblad,
    FloquetLindblad,
    Redfield,
    FloquetRedfield,
}

impl GeneratorKind {
    pub fn is_floquet(self) -> bool {
        matches!(
            self,
            GeneratorKind::FloquetLindblad | GeneratorKind::FloquetRedfield
        )
    }

    pub fn is_redfield(self) -> bool {
        matches!(
            self,
            GeneratorKind::Redfield | GeneratorKind::FloquetRedfield
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Lindblad => "lindblad",
            GeneratorKind::FloquetLindblad => "floquet_lindblad",
            GeneratorKind::Redfield => "redfield",
            GeneratorKind::FloquetRedfield => "floquet_redfield",
        }
    }
}

/// Which cross terms a Redfield-type generator keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SecularMode {
    /// All pairs with the same harmonic q (every ω, ω′).
    #[default]
    Partial,
    /// Only ω′ = ω, without principal-value terms.
    Full,
}

/// Frame in which a generator acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Schrodinger,
    /// Interaction picture with respect to the system propagator U_S(t).
    Interaction,
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub hamiltonian: DrivenHamiltonian,
    pub lamb_shift: bool,
    pub channels: Vec<CouplingChannel>,
    pub floquet: Option<Arc<FloquetDecomposition>>,
    pub lamb_params: LambIntegralParams,
    pub q_max: usize,
    pub fourier_floor: f64,
    pub gap_tol: f64,
    /// Nodes per period for τ-periodic generators.
    pub period_nodes: usize,
    pub secular: SecularMode,
}

impl GeneratorSpec {
    pub fn new(
        kind: GeneratorKind,
        hamiltonian: DrivenHamiltonian,
        channels: Vec<CouplingChannel>,
    ) -> Self {
        GeneratorSpec {
            kind,
            hamiltonian,
            lamb_shift: true,
            channels,
            floquet: None,
            lamb_params: LambIntegralParams::default(),
            q_max: 24,
            fourier_floor: 1e-3,
            gap_tol: 1e-4,
            period_nodes: 256,
            secular: SecularMode::Partial,
        }
    }

    fn check_kind(&self, expected: GeneratorKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::Config(format!(
                "generator spec of kind {} passed to the {} builder",
                self.kind.name(),
                expected.name()
            )));
        }
        if self.kind.is_floquet() != self.floquet.is_some() {
            return Err(Error::Config(
                "a Floquet decomposition is required exactly for Floquet kinds".into(),
            ));
        }
        if self.kind.is_floquet() && self.hamiltonian.drive.is_none() {
            return Err(Error::Config("Floquet generators need a drive".into()));
        }
        for ch in &self.channels {
            ch.bath.validate(self.hamiltonian.dim())?;
            ch.validate()?;
        }
        self.lamb_params.validate()
    }
}

#[derive(Debug, Clone)]
enum Body {
    Static(SuperOp),
    Periodic {
        tau: f64,
        nodes: Vec<SuperOp>,
        hamiltonian: DrivenHamiltonian,
    },
}

/// dρ/dt = L(t)ρ.
#[derive(Debug, Clone)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub picture: Picture,
    dim: usize,
    body: Body,
    /// Lamb-shift Hamiltonian contributed by each bath (Lindblad kinds).
    pub lamb_hamiltonians: Vec<(String, Operator)>,
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> Option<f64> {
        match &self.body {
            Body::Static(_) => None,
            Body::Periodic { tau, .. } => Some(*tau),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self.body, Body::Periodic { .. })
    }

    /// The superoperator at time t (linear interpolation between cached
    /// nodes for τ-periodic generators; the coherent part is exact).
    pub fn superoperator_at(&self, t: f64) -> SuperOp {
        match &self.body {
            Body::Static(s) => s.clone(),
            Body::Periodic {
                tau,
                nodes,
                hamiltonian,
            } => interpolate(nodes, *tau, t) + hamiltonian_part(&hamiltonian.at(t)),
        }
    }

    /// The time-independent superoperator, if any.
    pub fn static_superoperator(&self) -> Option<&SuperOp> {
        match &self.body {
            Body::Static(s) => Some(s),
            Body::Periodic { .. } => None,
        }
    }

    pub fn apply(&self, t: f64, rho: &Operator) -> Operator {
        match &self.body {
            Body::Static(s) => apply(s, rho),
            Body::Periodic {
                tau,
                nodes,
                hamiltonian,
            } => {
                let v = vectorize(rho);
                let (k, th) = node_position(nodes.len(), *tau, t);
                let mut out = &nodes[k] * &v;
                if th > 0.0 {
                    let k1 = (k + 1) % nodes.len();
                    out = out * c(1.0 - th) + (&nodes[k1] * &v) * c(th);
                }
                let h = hamiltonian.at(t);
                unvectorize(&out, self.dim) - (&h * rho - rho * &h) * crate::operator::I
            }
        }
    }

    /// Schrödinger-picture form of a static interaction-picture generator
    /// whose system propagator is e^{−iH0t} (valid for secular generators,
    /// which commute with the free evolution).
    pub fn with_free_evolution(&self, h0: &Operator) -> Result<Generator> {
        match (&self.body, self.picture) {
            (Body::Static(s), Picture::Interaction) => Ok(Generator {
                kind: self.kind,
                picture: Picture::Schrodinger,
                dim: self.dim,
                body: Body::Static(s + hamiltonian_part(h0)),
                lamb_hamiltonians: self.lamb_hamiltonians.clone(),
            }),
            _ => Err(Error::Config(
                "only static interaction-picture generators can be transformed".into(),
            )),
        }
    }
}

fn node_position(n: usize, tau: f64, t: f64) -> (usize, f64) {
    let s = (t / tau).rem_euclid(1.0) * n as f64;
    let k = s.floor();
    let th = s - k;
    let k = (k as usize).min(n - 1);
    // snap values within rounding of a node
    if th < 1e-9 {
        (k, 0.0)
    } else if th > 1.0 - 1e-9 {
        ((k + 1) % n, 0.0)
    } else {
        (k, th)
    }
}

fn interpolate(nodes: &[SuperOp], tau: f64, t: f64) -> SuperOp {
    let (k, th) = node_position(nodes.len(), tau, t);
    if th == 0.0 {
        nodes[k].clone()
    } else {
        &nodes[k] * c(1.0 - th) + &nodes[(k + 1) % nodes.len()] * c(th)
    }
}

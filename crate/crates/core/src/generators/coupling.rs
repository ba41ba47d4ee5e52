use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::operator::{c, ket_bra, require_hermitian, Operator, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaKind {
    X,
    Y,
}

/// ½(|i⟩⟨j| + |j⟩⟨i|) or (i/2)(|i⟩⟨j| − |j⟩⟨i|) in dimension d.
pub fn coupling_decomposition(
    d: usize,
    transition: (usize, usize),
    kind: SigmaKind,
) -> Result<Operator> {
    let (i, j) = transition;
    if i == j || i >= d || j >= d {
        return Err(Error::Validation(format!(
            "invalid transition ({i}, {j}) in dimension {d}"
        )));
    }
    let a = ket_bra(d, i, j);
    let b = ket_bra(d, j, i);
    Ok(match kind {
        SigmaKind::X => (a + b) * c(0.5),
        SigmaKind::Y => (a - b) * (I * 0.5),
    })
}

/// A bath together with the system operators it couples to.
///
/// `operators` feed the Lindblad-type generators; `transitions` and
/// `dipoles` (one per transition) feed the Redfield-type generators, where
/// each transition (i, j) enters as |upper⟩⟨lower|.
#[derive(Debug, Clone)]
pub struct CouplingChannel {
    pub bath: BathSpec,
    pub operators: Vec<Operator>,
    pub transitions: Vec<(usize, usize)>,
    pub dipoles: Option<Vec<f64>>,
}

impl CouplingChannel {
    /// σx/σy pair for every transition of the bath.
    pub fn sigma_pairs(bath: &BathSpec, d: usize) -> Result<Self> {
        bath.validate(d)?;
        let mut operators = Vec::with_capacity(2 * bath.transitions.len());
        for &t in &bath.transitions {
            operators.push(coupling_decomposition(d, t, SigmaKind::X)?);
            operators.push(coupling_decomposition(d, t, SigmaKind::Y)?);
        }
        Ok(CouplingChannel {
            bath: bath.clone(),
            operators,
            transitions: bath.transitions.clone(),
            dipoles: bath.dipoles.clone(),
        })
    }

    pub fn with_dipoles(mut self, dipoles: Vec<f64>) -> Self {
        self.dipoles = Some(dipoles);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for op in &self.operators {
            require_hermitian(op, 1e-10, "coupling operator")?;
        }
        Ok(())
    }

    /// (σ_ij = |upper⟩⟨lower|, μ_ij) for each transition, ordered by the
    /// energies on the diagonal of `h0`.
    pub fn lowering_free_transitions(&self, h0: &Operator) -> Result<Vec<(Operator, f64)>> {
        let d = h0.nrows();
        let dip = self.dipoles.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "bath '{}': Redfield generators need transition dipoles",
                self.bath.name
            ))
        })?;
        if dip.len() != self.transitions.len() {
            return Err(Error::Config(format!(
                "bath '{}': {} dipoles for {} transitions",
                self.bath.name,
                dip.len(),
                self.transitions.len()
            )));
        }
        Ok(self
            .transitions
            .iter()
            .zip(dip)
            .map(|(&(i, j), &m)| {
                let (up, lo) = if h0[(i, i)].re >= h0[(j, j)].re {
                    (i, j)
                } else {
                    (j, i)
                };
                (ket_bra(d, up, lo), m)
            })
            .collect())
    }
}

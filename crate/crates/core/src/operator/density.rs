use super::{c, hermitian_defect, ket_bra, min_eigenvalue, tolerances, Operator};
use crate::error::{Error, Result};

/// Trace-one Hermitian matrix. Positivity is reported, not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let tol = tolerances();
        if op.nrows() != op.ncols() {
            return Err(Error::Validation("density matrix must be square".into()));
        }
        let defect = hermitian_defect(&op);
        if defect > tol.density_hermitian {
            return Err(Error::Validation(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol.density_trace || tr.im.abs() > tol.density_trace {
            return Err(Error::Validation(format!("density matrix trace {tr} ≠ 1")));
        }
        Ok(DensityMatrix { op })
    }

    pub fn pure(d: usize, level: usize) -> Result<Self> {
        if level >= d {
            return Err(Error::Validation(format!(
                "level {level} outside dimension {d}"
            )));
        }
        Ok(DensityMatrix {
            op: ket_bra(d, level, level),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            op: Operator::identity(d, d) * c(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.nrows()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn population(&self, k: usize) -> f64 {
        self.op[(k, k)].re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.op)
    }

    /// Whether the minimum eigenvalue clears the soft positivity bound.
    pub fn is_positive(&self) -> bool {
        self.min_eigenvalue() >= -tolerances().positivity
    }
}

//! Superoperators acting on column-stacked density matrices.

use crate::operator::{c, identity, Operator, C64, I};
use nalgebra::{DMatrix, DVector};

pub type SuperOp = DMatrix<C64>;

pub fn vectorize(rho: &Operator) -> DVector<C64> {
    DVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &DVector<C64>, d: usize) -> Operator {
    Operator::from_column_slice(d, d, v.as_slice())
}

/// ρ ↦ Aρ
pub fn left(a: &Operator) -> SuperOp {
    identity(a.nrows()).kronecker(a)
}

/// ρ ↦ ρB
pub fn right(b: &Operator) -> SuperOp {
    b.transpose().kronecker(&identity(b.nrows()))
}

/// ρ ↦ AρB
pub fn sandwich(a: &Operator, b: &Operator) -> SuperOp {
    b.transpose().kronecker(a)
}

/// ρ ↦ −i[H, ρ]
pub fn hamiltonian_part(h: &Operator) -> SuperOp {
    (left(h) - right(h)) * (-I)
}

/// ρ ↦ SρS† − ½{S†S, ρ}
pub fn dissipator(s: &Operator) -> SuperOp {
    let sd = s.adjoint();
    let n = &sd * s;
    sandwich(s, &sd) - (left(&n) + right(&n)) * c(0.5)
}

pub fn apply(sup: &SuperOp, rho: &Operator) -> Operator {
    unvectorize(&(sup * vectorize(rho)), rho.nrows())
}

/// ‖S‖ as the Frobenius norm.
pub fn super_norm(s: &SuperOp) -> f64 {
    s.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{commutator, from_real, ket_bra};

    #[test]
    fn kronecker_conventions() {
        let a = from_real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = ket_bra(2, 0, 1) + ket_bra(2, 1, 1) * c(0.5);
        let rho = from_real(&[&[0.3, 0.1], &[0.1, 0.7]]);
        assert!((apply(&left(&a), &rho) - &a * &rho).norm() < 1e-14);
        assert!((apply(&right(&b), &rho) - &rho * &b).norm() < 1e-14);
        assert!((apply(&sandwich(&a, &b), &rho) - &a * &rho * &b).norm() < 1e-14);
        let h = from_real(&[&[0.0, 1.0], &[1.0, 2.0]]);
        assert!((apply(&hamiltonian_part(&h), &rho) - commutator(&h, &rho) * (-I)).norm() < 1e-14);
    }

    #[test]
    fn dissipator_is_trace_free() {
        let s = ket_bra(3, 0, 2) + ket_bra(3, 1, 0) * c(0.3);
        let rho = from_real(&[&[0.5, 0.1, 0.0], &[0.1, 0.3, 0.05], &[0.0, 0.05, 0.2]]);
        assert!(apply(&dissipator(&s), &rho).trace().norm() < 1e-15);
    }
}

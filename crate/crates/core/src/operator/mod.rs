//! Dense complex operators on a d-level Hilbert space.

mod density;
mod tolerances;

pub use density::DensityMatrix;
pub use tolerances::{set_tolerances, tolerances, Tolerances};

use crate::error::{Error, Result};
use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};

pub type C64 = nalgebra::Complex<f64>;
pub type Operator = DMatrix<C64>;

/// ħ, c, k_B and ε0, all fixed to one.
pub struct Constants;

impl Constants {
    pub const HBAR: f64 = 1.0;
    pub const C: f64 = 1.0;
    pub const K_B: f64 = 1.0;
    pub const EPSILON_0: f64 = 1.0;
}

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Operator,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> DVector<C64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// V f(Λ) V† for a real function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> Operator {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let w = f(e);
            for r in 0..v.nrows() {
                scaled[(r, k)] *= w;
            }
        }
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(c)
    }
}

pub fn identity(d: usize) -> Operator {
    Operator::identity(d, d)
}

pub fn zeros(d: usize) -> Operator {
    Operator::zeros(d, d)
}

/// |i⟩⟨j| in dimension d.
pub fn ket_bra(d: usize, i: usize, j: usize) -> Operator {
    let mut m = zeros(d);
    m[(i, j)] = c(1.0);
    m
}

pub fn diag(values: &[f64]) -> Operator {
    let d = values.len();
    let mut m = zeros(d);
    for (k, &v) in values.iter().enumerate() {
        m[(k, k)] = c(v);
    }
    m
}

pub fn from_real(rows: &[&[f64]]) -> Operator {
    let d = rows.len();
    Operator::from_fn(d, rows[0].len(), |i, j| c(rows[i][j]))
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    a * b + b * a
}

/// Frobenius norm of H − H†.
pub fn hermitian_defect(h: &Operator) -> f64 {
    (h - h.adjoint()).norm()
}

/// Frobenius norm of U†U − I.
pub fn unitarity_defect(u: &Operator) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).norm()
}

pub fn hermitian_part(h: &Operator) -> Operator {
    (h + h.adjoint()) * c(0.5)
}

fn require_square(m: &Operator, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Validation(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Validation(format!("{what} has non-finite entries")));
    }
    Ok(())
}

pub fn require_hermitian(h: &Operator, tol: f64, what: &str) -> Result<()> {
    require_square(h, what)?;
    let scale = h.norm().max(1.0);
    let defect = hermitian_defect(h);
    if defect > tol * scale {
        return Err(Error::Validation(format!(
            "{what} is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

pub fn require_unitary(u: &Operator, tol: f64, what: &str) -> Result<()> {
    require_square(u, what)?;
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::Validation(format!(
            "{what} is not unitary (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Ascending eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigensystem(h: &Operator) -> Result<Spectrum> {
    require_hermitian(h, tolerances().hermitian, "operator")?;
    Ok(eigensystem_unchecked(&hermitian_part(h)))
}

pub(crate) fn eigensystem_unchecked(h: &Operator) -> Spectrum {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors =
        Operator::from_fn(h.nrows(), h.nrows(), |r, k| eig.eigenvectors[(r, order[k])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// e^{−iHt} for Hermitian H.
pub fn unitary_from_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    let spec = hermitian_eigensystem(h)?;
    Ok(spec.map(|e| C64::from_polar(1.0, -e * t)))
}

/// e^{A} for anti-Hermitian A.
pub fn exp_anti_hermitian(a: &Operator) -> Result<Operator> {
    // A = −iK with K = iA Hermitian
    let k = a * I;
    unitary_from_hermitian(&hermitian_part(&k), 1.0)
}

/// Eigen-decomposition of a unitary matrix: eigenphases θ_k ∈ (−π, π] with
/// U = Q diag(e^{iθ}) Q†.
pub fn unitary_eigensystem(u: &Operator) -> Result<(Vec<f64>, Operator)> {
    require_unitary(u, tolerances().unitary, "operator")?;
    let (q, t) = Schur::new(u.clone()).unpack();
    let mut phases: Vec<f64> = (0..u.nrows()).map(|k| t[(k, k)].arg()).collect();
    for p in phases.iter_mut() {
        if *p <= -std::f64::consts::PI {
            *p += 2.0 * std::f64::consts::PI;
        }
    }
    // A normal matrix has a diagonal Schur form; reorthonormalise Q against drift.
    let q = orthonormalize(&q);
    Ok((phases, q))
}

fn orthonormalize(q: &Operator) -> Operator {
    let qr = q.clone().qr();
    let mut out = qr.q();
    let r = qr.r();
    for k in 0..out.ncols() {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for row in 0..out.nrows() {
                out[(row, k)] *= phase;
            }
        }
    }
    out
}

/// Hermitian K with U = e^{−iK}; eigenphases of U taken in (−π, π].
pub fn principal_unitary_log(u: &Operator) -> Result<Operator> {
    let (phases, q) = unitary_eigensystem(u)?;
    let spec = Spectrum {
        eigenvalues: phases.iter().map(|p| -p).collect(),
        eigenvectors: q,
    };
    Ok(hermitian_part(&spec.reconstruct()))
}

/// (1/d)|Tr U V†|.
pub fn unitary_fidelity(u: &Operator, v: &Operator) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::Validation(format!(
            "dimension mismatch {:?} vs {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let tol = tolerances().unitary;
    require_unitary(u, tol, "first operator")?;
    require_unitary(v, tol, "second operator")?;
    Ok(fidelity_unchecked(u, v))
}

pub(crate) fn fidelity_unchecked(u: &Operator, v: &Operator) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..u.nrows() {
        for k in 0..u.ncols() {
            tr += u[(i, k)] * v[(i, k)].conj();
        }
    }
    tr.norm() / u.nrows() as f64
}

/// ½ Σ|λ_k(A − B)| for Hermitian A, B.
pub fn trace_distance(a: &Operator, b: &Operator) -> f64 {
    let diff = hermitian_part(&(a - b));
    let eig = SymmetricEigen::new(diff);
    0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

pub fn min_eigenvalue(h: &Operator) -> f64 {
    let eig = SymmetricEigen::new(hermitian_part(h));
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn trace(m: &Operator) -> C64 {
    m.trace()
}

/// Largest entry modulus.
pub fn max_abs(m: &Operator) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator norm bound used in heuristics (Frobenius).
pub fn norm(m: &Operator) -> f64 {
    m.norm()
}

use super::propagate::propagate_samples;
use crate::error::{Error, Result};
use crate::operator::{
    eigensystem_unchecked, hermitian_part, require_hermitian, tolerances, unitary_eigensystem,
    Operator, Spectrum, C64,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sampling of one drive period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetGrid {
    /// Number M of uniformly spaced samples of P(t) on [0, τ).
    pub samples: usize,
    /// RK4 steps per sample interval.
    pub substeps: usize,
}

impl Default for FloquetGrid {
    fn default() -> Self {
        FloquetGrid {
            samples: 1024,
            substeps: 16,
        }
    }
}

/// Which quasienergy branch H̄ uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Each quasienergy placed within Ω/2 of the undriven level it continues.
    Unfolded,
    /// Quasienergies in [−Ω/2, Ω/2).
    Principal,
}

/// U(t, 0) = P(t, 0) e^{−iH̄t} for a τ-periodic Hamiltonian.
#[derive(Debug, Clone)]
pub struct FloquetDecomposition {
    pub hbar_floquet: Operator,
    pub quasi: Spectrum,
    /// (t_m, P(t_m, 0)) for t_m = mτ/M, m = 0..M.
    pub p_samples: Vec<(f64, Operator)>,
    pub tau: f64,
    pub branch: Branch,
    u_samples: Vec<Operator>,
    eigvecs: Operator,
    principal: Vec<f64>,
    unfolded: Vec<f64>,
}

impl FloquetDecomposition {
    pub fn omega(&self) -> f64 {
        2.0 * PI / self.tau
    }

    pub fn dim(&self) -> usize {
        self.hbar_floquet.nrows()
    }

    /// Number M of samples per period.
    pub fn grid_len(&self) -> usize {
        self.p_samples.len()
    }

    pub fn monodromy(&self) -> &Operator {
        &self.u_samples[self.grid_len()]
    }

    /// The same monodromy expressed on another quasienergy branch.
    pub fn with_branch(&self, branch: Branch) -> FloquetDecomposition {
        let energies = match branch {
            Branch::Unfolded => &self.unfolded,
            Branch::Principal => &self.principal,
        };
        assemble(
            self.u_samples.clone(),
            self.tau,
            &self.eigvecs,
            energies,
            self.principal.clone(),
            self.unfolded.clone(),
            branch,
        )
    }

    /// P(t_m, 0) for any integer m (periodic in m).
    pub fn periodic_operator_at_index(&self, m: usize) -> &Operator {
        &self.p_samples[m % self.grid_len()].1
    }

    /// e^{−iH̄t}.
    pub fn floquet_exponential(&self, t: f64) -> Operator {
        self.quasi.map(|e| C64::from_polar(1.0, -e * t))
    }

    /// U(kτ/M, 0) for a grid index k ≥ 0.
    pub fn propagator_at_index(&self, k: usize) -> Operator {
        let m = self.grid_len();
        let t = k as f64 * self.tau / m as f64;
        self.periodic_operator_at_index(k) * self.floquet_exponential(t)
    }

    /// Grid index of t if t is a multiple of τ/M (relative tolerance 1e-9).
    pub fn grid_index(&self, t: f64) -> Option<usize> {
        let s = t * self.grid_len() as f64 / self.tau;
        let k = s.round();
        if k >= 0.0 && (s - k).abs() < 1e-9 * s.abs().max(1.0) {
            Some(k as usize)
        } else {
            None
        }
    }

    /// P(t, 0) by linear interpolation between samples; exact on the grid.
    pub fn periodic_operator(&self, t: f64) -> Operator {
        let m = self.grid_len();
        let s = (t / self.tau).rem_euclid(1.0) * m as f64;
        let k = (s.floor() as usize).min(m - 1);
        let th = s - k as f64;
        if th == 0.0 {
            return self.p_samples[k].1.clone();
        }
        let a = &self.p_samples[k].1;
        let b = &self.p_samples[(k + 1) % m].1;
        a * C64::new(1.0 - th, 0.0) + b * C64::new(th, 0.0)
    }
}

/// Floquet decomposition of a τ-periodic Hamiltonian.
///
/// Quasienergies are unfolded against `reference` (the undriven H0): the
/// Floquet eigenvector with the largest overlap with an H0 eigenspace is
/// shifted by a multiple of Ω to lie within Ω/2 of that eigenvalue.
pub fn floquet_decompose(
    h: &dyn Fn(f64) -> Operator,
    tau: f64,
    reference: &Operator,
    grid: FloquetGrid,
) -> Result<FloquetDecomposition> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Validation("period must be positive".into()));
    }
    if grid.samples < 2 || grid.substeps == 0 {
        return Err(Error::Validation(
            "Floquet grid needs at least two samples and one substep".into(),
        ));
    }
    require_hermitian(reference, tolerances().hermitian, "reference Hamiltonian")?;
    let u_samples = propagate_samples(h, 0.0, tau, grid.samples, grid.substeps)?;
    let (phases, q) = unitary_eigensystem(&u_samples[grid.samples])?;
    let principal: Vec<f64> = phases.iter().map(|p| -p / tau).collect();
    let omega = 2.0 * PI / tau;
    let unfolded = unfold(&principal, &q, reference, omega)?;
    Ok(assemble(
        u_samples,
        tau,
        &q,
        &unfolded,
        principal,
        unfolded.clone(),
        Branch::Unfolded,
    ))
}

fn unfold(principal: &[f64], q: &Operator, reference: &Operator, omega: f64) -> Result<Vec<f64>> {
    let refspec = eigensystem_unchecked(&hermitian_part(reference));
    let d = principal.len();
    let scale = refspec
        .eigenvalues
        .iter()
        .fold(1.0f64, |a, e| a.max(e.abs()));
    // eigenspaces of the reference
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..d {
        match groups.last_mut() {
            Some(g)
                if (refspec.eigenvalues[k] - refspec.eigenvalues[g[0]]).abs() <= 1e-9 * scale =>
            {
                g.push(k)
            }
            _ => groups.push(vec![k]),
        }
    }
    let mut used = vec![0usize; groups.len()];
    let mut out = vec![0.0; d];
    for k in 0..d {
        let v = q.column(k);
        let overlaps: Vec<f64> = groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&r| refspec.eigenvectors.column(r).dotc(&v).norm_sqr())
                    .sum()
            })
            .collect();
        let (best, _) = overlaps
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &o)| if o > acc.1 { (i, o) } else { acc },
            );
        used[best] += 1;
        let target = refspec.eigenvalues[groups[best][0]];
        let s = (target - principal[k]) / omega;
        let n = s.round();
        if ((s - n).abs() - 0.5).abs() * omega < 1e-6 {
            return Err(Error::Numerical(format!(
                "ambiguous unfolding: quasienergy {} is equidistant from two branches around reference level {}",
                principal[k], target
            )));
        }
        out[k] = principal[k] + n * omega;
    }
    for (g, &u) in groups.iter().zip(&used) {
        if u != g.len() {
            return Err(Error::Numerical(format!(
                "ambiguous unfolding: reference level {} (multiplicity {}) matched {} Floquet states",
                refspec.eigenvalues[g[0]],
                g.len(),
                u
            )));
        }
    }
    Ok(out)
}

fn assemble(
    u_samples: Vec<Operator>,
    tau: f64,
    q: &Operator,
    energies: &[f64],
    principal: Vec<f64>,
    unfolded: Vec<f64>,
    branch: Branch,
) -> FloquetDecomposition {
    let d = energies.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let quasi = Spectrum {
        eigenvalues: order.iter().map(|&k| energies[k]).collect(),
        eigenvectors: Operator::from_fn(d, d, |r, k| q[(r, order[k])]),
    };
    let hbar_floquet = hermitian_part(&quasi.reconstruct());
    let m = u_samples.len() - 1;
    let p_samples = (0..m)
        .map(|k| {
            let t = k as f64 * tau / m as f64;
            let back = quasi.map(|e| C64::from_polar(1.0, e * t));
            (t, &u_samples[k] * back)
        })
        .collect();
    FloquetDecomposition {
        hbar_floquet,
        quasi,
        p_samples,
        tau,
        branch,
        u_samples,
        eigvecs: q.clone(),
        principal,
        unfolded,
    }
}

use super::superop::{dissipator, hamiltonian_part, SuperOp};
use super::{Body, CouplingChannel, Generator, GeneratorKind, GeneratorSpec, Picture};
use crate::bath::{gamma, xi, BathSpec, LambIntegralParams};
use crate::error::{Error, Result};
use crate::floquet::{fourier_operator_coefficients, jump_operator_table, static_jump_table};
use crate::operator::{c, hermitian_eigensystem, hermitian_part, zeros, Operator};
use std::collections::HashMap;

/// Memoized γ(x), ξ(x) for one bath.
struct RateCache<'a> {
    bath: &'a BathSpec,
    lamb: &'a LambIntegralParams,
    with_xi: bool,
    values: HashMap<i64, (f64, f64)>,
}

impl<'a> RateCache<'a> {
    fn new(bath: &'a BathSpec, lamb: &'a LambIntegralParams, with_xi: bool) -> Self {
        RateCache {
            bath,
            lamb,
            with_xi,
            values: HashMap::new(),
        }
    }

    fn get(&mut self, x: f64) -> Result<(f64, f64)> {
        let key = (x * 1e10).round() as i64;
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let g = gamma(&self.bath.spectral, self.bath.beta, x);
        let s = if self.with_xi {
            xi(&self.bath.spectral, self.bath.beta, x, self.lamb)?
        } else {
            0.0
        };
        self.values.insert(key, (g, s));
        Ok((g, s))
    }
}

/// Σ γ(x) D[S_x] and Σ ξ(x) S_x†S_x over the given (frequency, operator) list.
fn assemble(
    jumps: &[(f64, Operator)],
    cache: &mut RateCache,
    dim: usize,
) -> Result<(SuperOp, Operator)> {
    let mut sup = SuperOp::zeros(dim * dim, dim * dim);
    let mut lamb = zeros(dim);
    for (x, s) in jumps {
        let (g, l) = cache.get(*x)?;
        if g != 0.0 {
            sup += dissipator(s) * c(g);
        }
        if l != 0.0 {
            lamb += s.adjoint() * s * c(l);
        }
    }
    Ok((sup, lamb))
}

fn finish(
    kind: GeneratorKind,
    dim: usize,
    parts: Vec<(String, SuperOp, Operator)>,
    lamb_shift: bool,
) -> Generator {
    let mut sup = SuperOp::zeros(dim * dim, dim * dim);
    let mut lambs = Vec::with_capacity(parts.len());
    for (name, d, l) in parts {
        sup += d;
        let l = hermitian_part(&l);
        if lamb_shift {
            sup += hamiltonian_part(&l);
        }
        lambs.push((name, l));
    }
    Generator {
        kind,
        picture: Picture::Interaction,
        dim,
        body: Body::Static(sup),
        lamb_hamiltonians: lambs,
    }
}

fn static_jumps(ch: &CouplingChannel, h0: &Operator, gap_tol: f64) -> Result<Vec<(f64, Operator)>> {
    let spec = hermitian_eigensystem(h0)?;
    let mut out = Vec::new();
    for s in &ch.operators {
        for (_, w, op) in static_jump_table(s, &spec, gap_tol).iter() {
            out.push((w, op.clone()));
        }
    }
    Ok(out)
}

/// Secular Lindblad generator of the undriven system in the interaction
/// picture of e^{−iH0t}: Σ γ(ω)D[S(ω)] − i[H_LS, ·].
pub fn lindblad_generator_interaction(spec: &GeneratorSpec) -> Result<Generator> {
    spec.check_kind(GeneratorKind::Lindblad)?;
    let h0 = &spec.hamiltonian.h0;
    let d = h0.nrows();
    let mut parts = Vec::with_capacity(spec.channels.len());
    for ch in &spec.channels {
        let jumps = static_jumps(ch, h0, spec.gap_tol)?;
        let mut cache = RateCache::new(&ch.bath, &spec.lamb_params, spec.lamb_shift);
        let (sup, lamb) = assemble(&jumps, &mut cache, d)?;
        parts.push((ch.bath.name.clone(), sup, lamb));
    }
    Ok(finish(GeneratorKind::Lindblad, d, parts, spec.lamb_shift))
}

/// Secular Lindblad generator in the Schrödinger picture.
pub fn lindblad_generator(spec: &GeneratorSpec) -> Result<Generator> {
    if spec.hamiltonian.drive.is_some() {
        return Err(Error::Config(
            "the Lindblad generator describes the undriven system; use floquet_lindblad".into(),
        ));
    }
    lindblad_generator_interaction(spec)?.with_free_evolution(&spec.hamiltonian.h0)
}

/// Floquet-Lindblad generator in the interaction picture of
/// U_S(t) = P(t)e^{−iH̄t}: Σ_{q,ω} γ(ω+qΩ)D[S(q,ω)] − i[H_LS, ·].
pub fn floquet_lindblad_generator(spec: &GeneratorSpec) -> Result<Generator> {
    spec.check_kind(GeneratorKind::FloquetLindblad)?;
    let decomp = spec.floquet.as_ref().expect("checked by check_kind");
    let d = decomp.dim();
    let omega = decomp.omega();
    let mut parts = Vec::with_capacity(spec.channels.len());
    for ch in &spec.channels {
        let mut jumps = Vec::new();
        for s in &ch.operators {
            let fset = fourier_operator_coefficients(decomp, s, spec.q_max, spec.fourier_floor)?;
            let table = jump_operator_table(&fset, &decomp.quasi, spec.gap_tol);
            for (q, w, op) in table.iter() {
                jumps.push((w + q as f64 * omega, op.clone()));
            }
        }
        if jumps.is_empty() {
            return Err(Error::Numerical(format!(
                "bath '{}': every Fourier harmonic of the coupling falls below the floor {}",
                ch.bath.name, spec.fourier_floor
            )));
        }
        let mut cache = RateCache::new(&ch.bath, &spec.lamb_params, spec.lamb_shift);
        let (sup, lamb) = assemble(&jumps, &mut cache, d)?;
        parts.push((ch.bath.name.clone(), sup, lamb));
    }
    Ok(finish(
        GeneratorKind::FloquetLindblad,
        d,
        parts,
        spec.lamb_shift,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::SpectralDensity;
    use crate::floquet::DrivenHamiltonian;
    use crate::generators::superop::apply;
    use crate::operator::{diag, ket_bra};
    use std::f64::consts::PI;

    fn qubit(lamb_shift: bool) -> (GeneratorSpec, BathSpec) {
        let bath = BathSpec {
            name: "hot".into(),
            beta: 0.5,
            spectral: SpectralDensity::Ohmic {
                j0: 1e-3,
                omega_cutoff: 4.0,
            },
            transitions: vec![(0, 1)],
            dipoles: None,
        };
        let ch = CouplingChannel::sigma_pairs(&bath, 2).unwrap();
        let ham = DrivenHamiltonian::new(diag(&[0.0, 3.0]), None);
        let mut spec = GeneratorSpec::new(GeneratorKind::Lindblad, ham, vec![ch]);
        spec.lamb_shift = lamb_shift;
        (spec, bath)
    }

    #[test]
    fn qubit_population_rates() {
        let (spec, bath) = qubit(false);
        let g = lindblad_generator(&spec).unwrap();
        let j = bath.spectral.eval(3.0);
        let n = 1.0 / (bath.beta * 3.0f64).exp_m1();
        // σx and σy each contribute |1⟩⟨0|/2 at ω = +3, so the upward rate is
        // 2·γ(3)/4 = 2πn̄J
        let up = apply(g.static_superoperator().unwrap(), &ket_bra(2, 0, 0))[(1, 1)].re;
        assert!((up - 2.0 * PI * n * j).abs() < 1e-14 * up.abs().max(1.0));
        let down = apply(g.static_superoperator().unwrap(), &ket_bra(2, 1, 1))[(0, 0)].re;
        assert!((down - 2.0 * PI * (n + 1.0) * j).abs() < 1e-14);
    }

    #[test]
    fn gibbs_state_is_stationary() {
        let (spec, bath) = qubit(true);
        let g = lindblad_generator(&spec).unwrap();
        let z = 1.0 + (-bath.beta * 3.0f64).exp();
        let rho = diag(&[1.0 / z, (-bath.beta * 3.0f64).exp() / z]);
        assert!(apply(g.static_superoperator().unwrap(), &rho).norm() < 1e-15);
        let l = &g.lamb_hamiltonians[0].1;
        assert!((l - diag(&[l[(0, 0)].re, l[(1, 1)].re])).norm() < 1e-15);
    }

    #[test]
    fn rejects_wrong_kind() {
        let (mut spec, _) = qubit(false);
        spec.kind = GeneratorKind::Redfield;
        assert!(lindblad_generator(&spec).is_err());
    }
}

use super::superop::{hamiltonian_part, left, right, sandwich, SuperOp};
use super::{Body, Generator, GeneratorKind, GeneratorSpec, Picture, SecularMode};
use crate::bath::{redfield_coefficients, LambIntegralParams, RedfieldCoefficients};
use crate::error::{Error, Result};
use crate::floquet::{
    fourier_operator_coefficients, jump_operator_table, static_jump_table, FourierOperatorSet,
    JumpOperatorTable,
};
use crate::operator::{c, hermitian_eigensystem, zeros, Operator, I};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

/// K′ = 1/(6π), the prefactor of the dipole-coupled Redfield generator.
pub const REDFIELD_PREFACTOR: f64 = 1.0 / (6.0 * PI);

struct CoefficientCache<'a> {
    beta: f64,
    lamb: &'a LambIntegralParams,
    values: HashMap<i64, RedfieldCoefficients>,
}

impl CoefficientCache<'_> {
    fn get(&mut self, x: f64) -> Result<RedfieldCoefficients> {
        let key = (x * 1e10).round() as i64;
        if let Some(v) = self.values.get(&key) {
            return Ok(*v);
        }
        let v = redfield_coefficients(x, self.beta, self.lamb)?;
        self.values.insert(key, v);
        Ok(v)
    }
}

/// Y together with the operators it pairs with, in the Floquet frame.
#[derive(Debug, Clone)]
struct Block {
    y: Operator,
    z1: Operator,
    z2: Operator,
    z3: Operator,
    z4: Operator,
}

impl Block {
    fn conjugate(&self, p: &Operator) -> Block {
        let pd = p.adjoint();
        let f = |a: &Operator| p * a * &pd;
        Block {
            y: f(&self.y),
            z1: f(&self.z1),
            z2: f(&self.z2),
            z3: f(&self.z3),
            z4: f(&self.z4),
        }
    }
}

/// −K′ Σ_blocks [term1 + term2 + term3 + term4] as a superoperator.
fn dissipative_part(blocks: &[Block], dim: usize) -> SuperOp {
    let mut l = zeros(dim);
    let mut r = zeros(dim);
    let mut sup = SuperOp::zeros(dim * dim, dim * dim);
    for b in blocks {
        let yd = b.y.adjoint();
        // YZ1ρ − Z1ρY
        l += &b.y * &b.z1;
        sup -= sandwich(&b.z1, &b.y);
        // ρZ2Y† − Y†ρZ2
        r += &b.z2 * &yd;
        sup -= sandwich(&yd, &b.z2);
        // ρZ3Y − YρZ3
        r += &b.z3 * &b.y;
        sup -= sandwich(&b.y, &b.z3);
        // Y†Z4ρ − Z4ρY†
        l += &yd * &b.z4;
        sup -= sandwich(&b.z4, &yd);
    }
    (sup + left(&l) + right(&r)) * c(-REDFIELD_PREFACTOR)
}

/// Per-transition gap tables of σ_ij, weighted by μ_ij.
type Tables = Vec<(f64, JumpOperatorTable)>;

fn build_blocks(
    tables: &Tables,
    omega: f64,
    q_range: (i64, i64),
    cache: &mut CoefficientCache,
    mode: SecularMode,
    keep_imag: bool,
    dim: usize,
) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    for q in q_range.0..=q_range.1 {
        // (ω index) → (Y part, list of (μ′, A′))
        let mut by_gap: BTreeMap<usize, Vec<(f64, &Operator)>> = BTreeMap::new();
        for (mu, t) in tables {
            for (&(qq, g), s) in &t.entries {
                if qq == q {
                    by_gap.entry(g).or_default().push((*mu, s));
                }
            }
        }
        if by_gap.is_empty() {
            continue;
        }
        let gaps = &tables[0].1.gaps;
        let zpart = |items: &[(f64, &Operator)],
                     x: f64,
                     cache: &mut CoefficientCache|
         -> Result<[Operator; 4]> {
            let k = cache.get(x)?;
            let (c1, c2) = if keep_imag {
                (k.c1_imag, k.c2_imag)
            } else {
                (0.0, 0.0)
            };
            let mut z = [zeros(dim), zeros(dim), zeros(dim), zeros(dim)];
            for &(mu, a) in items {
                let ad = a.adjoint();
                z[0] += &ad * ((c(k.n2) + I * c2) * mu);
                z[1] += a * ((c(k.n2) - I * c2) * mu);
                z[2] += &ad * ((c(k.n1) + I * c1) * mu);
                z[3] += a * ((c(k.n1) - I * c1) * mu);
            }
            Ok(z)
        };
        let ysum = |items: &[(f64, &Operator)]| {
            let mut y = zeros(dim);
            for &(mu, a) in items {
                y += a * c(mu);
            }
            y
        };
        let qf = q as f64 * omega;
        match mode {
            SecularMode::Partial => {
                let all: Vec<(f64, &Operator)> = by_gap.values().flatten().copied().collect();
                let y = ysum(&all);
                let mut z = [zeros(dim), zeros(dim), zeros(dim), zeros(dim)];
                for (&g, items) in &by_gap {
                    let part = zpart(items, gaps[g] + qf, cache)?;
                    for (acc, p) in z.iter_mut().zip(part) {
                        *acc += p;
                    }
                }
                let [z1, z2, z3, z4] = z;
                blocks.push(Block { y, z1, z2, z3, z4 });
            }
            SecularMode::Full => {
                for (&g, items) in &by_gap {
                    let [z1, z2, z3, z4] = zpart(items, gaps[g] + qf, cache)?;
                    blocks.push(Block {
                        y: ysum(items),
                        z1,
                        z2,
                        z3,
                        z4,
                    });
                }
            }
        }
    }
    Ok(blocks)
}

fn transitions(spec: &GeneratorSpec, ch: &super::CouplingChannel) -> Result<Vec<(Operator, f64)>> {
    let t = ch.lowering_free_transitions(&spec.hamiltonian.h0)?;
    if t.is_empty() {
        return Err(Error::Config(format!(
            "bath '{}' couples no transitions",
            ch.bath.name
        )));
    }
    Ok(t)
}

/// Redfield generator of the undriven system in the Schrödinger picture.
pub fn redfield_generator(spec: &GeneratorSpec) -> Result<Generator> {
    spec.check_kind(GeneratorKind::Redfield)?;
    if spec.hamiltonian.drive.is_some() {
        return Err(Error::Config(
            "the Redfield generator describes the undriven system; use floquet_redfield".into(),
        ));
    }
    let h0 = &spec.hamiltonian.h0;
    let d = h0.nrows();
    let eig = hermitian_eigensystem(h0)?;
    let keep_imag = spec.lamb_shift && spec.secular == SecularMode::Partial;
    let mut blocks = Vec::new();
    for ch in &spec.channels {
        let tables: Tables = transitions(spec, ch)?
            .into_iter()
            .map(|(s, mu)| (mu, static_jump_table(&s, &eig, spec.gap_tol)))
            .collect();
        let mut cache = CoefficientCache {
            beta: ch.bath.beta,
            lamb: &spec.lamb_params,
            values: HashMap::new(),
        };
        blocks.extend(build_blocks(
            &tables,
            0.0,
            (0, 0),
            &mut cache,
            spec.secular,
            keep_imag,
            d,
        )?);
    }
    let sup = dissipative_part(&blocks, d) + hamiltonian_part(h0);
    Ok(Generator {
        kind: GeneratorKind::Redfield,
        picture: Picture::Schrodinger,
        dim: d,
        body: Body::Static(sup),
        lamb_hamiltonians: Vec::new(),
    })
}

/// τ-periodic Floquet-Redfield generator in the Schrödinger picture, cached
/// at `period_nodes` equally spaced times per period.
pub fn floquet_redfield_generator(spec: &GeneratorSpec) -> Result<Generator> {
    spec.check_kind(GeneratorKind::FloquetRedfield)?;
    let decomp = spec.floquet.as_ref().expect("checked by check_kind");
    let d = decomp.dim();
    let m = decomp.grid_len();
    let n = spec.period_nodes;
    if n == 0 || m % n != 0 {
        return Err(Error::Numerical(format!(
            "grid resolution: {n} generator nodes per period do not divide the {m} Floquet samples"
        )));
    }
    let keep_imag = spec.lamb_shift && spec.secular == SecularMode::Partial;
    let q = spec.q_max as i64;
    let mut blocks = Vec::new();
    for ch in &spec.channels {
        let mut tables: Tables = Vec::new();
        let mut any = false;
        for (s, mu) in transitions(spec, ch)? {
            let fset: FourierOperatorSet =
                fourier_operator_coefficients(decomp, &s, spec.q_max, spec.fourier_floor)?;
            let t = jump_operator_table(&fset, &decomp.quasi, spec.gap_tol);
            any |= !t.entries.is_empty();
            tables.push((mu, t));
        }
        if !any {
            return Err(Error::Numerical(format!(
                "bath '{}': every Fourier harmonic of the coupling falls below the floor {}",
                ch.bath.name, spec.fourier_floor
            )));
        }
        let mut cache = CoefficientCache {
            beta: ch.bath.beta,
            lamb: &spec.lamb_params,
            values: HashMap::new(),
        };
        blocks.extend(build_blocks(
            &tables,
            decomp.omega(),
            (-q, q),
            &mut cache,
            spec.secular,
            keep_imag,
            d,
        )?);
    }
    let nodes = (0..n)
        .map(|k| {
            let p = decomp.periodic_operator_at_index(k * (m / n));
            let conj: Vec<Block> = blocks.iter().map(|b| b.conjugate(p)).collect();
            dissipative_part(&conj, d)
        })
        .collect();
    Ok(Generator {
        kind: GeneratorKind::FloquetRedfield,
        picture: Picture::Schrodinger,
        dim: d,
        body: Body::Periodic {
            tau: decomp.tau,
            nodes,
            hamiltonian: spec.hamiltonian.clone(),
        },
        lamb_hamiltonians: Vec::new(),
    })
}

/// The undriven dissipator expressed through the same block assembly, for
/// tests: P = I and a single harmonic.
#[cfg(test)]
fn identity_frame_check(blocks: &[Block], d: usize) -> SuperOp {
    let p = crate::operator::identity(d);
    let conj: Vec<Block> = blocks.iter().map(|b| b.conjugate(&p)).collect();
    dissipative_part(&conj, d)
}

mod common;

use common::{max_trace_distance, random_hermitian_unit_trace};
use floqdyn_core::bath::{BathSpec, SpectralDensity};
use floqdyn_core::floquet::Branch;
use floqdyn_core::generators::superop::{hamiltonian_part, sandwich, SuperOp};
use floqdyn_core::generators::{
    floquet_lindblad_generator, floquet_redfield_generator, lindblad_generator, CouplingChannel,
    Generator, GeneratorKind, GeneratorSpec, SecularMode,
};
use floqdyn_core::operator::{c, commutator, diag, ket_bra, Operator, I};
use floqdyn_core::scenarios::{
    decompose, evolve, generator_spec, prepare, preset, InitialState, IntegrationPlan,
    MethodConfig, ScenarioConfig,
};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

fn prepared(name: &str, kind: GeneratorKind) -> Generator {
    let mut c = preset(name).unwrap();
    c.method.kind = kind;
    let plan = IntegrationPlan::new(&c, 1.0, None, None).unwrap();
    prepare(&c, plan).unwrap().generator
}

fn all_generators() -> &'static Vec<(GeneratorKind, Generator)> {
    static G: OnceLock<Vec<(GeneratorKind, Generator)>> = OnceLock::new();
    G.get_or_init(|| {
        vec![
            (
                GeneratorKind::Lindblad,
                prepared("four_level_nondegenerate", GeneratorKind::Lindblad),
            ),
            (
                GeneratorKind::FloquetLindblad,
                prepared("three_level_v0", GeneratorKind::FloquetLindblad),
            ),
            (
                GeneratorKind::Redfield,
                prepared("four_level_nondegenerate", GeneratorKind::Redfield),
            ),
            (
                GeneratorKind::FloquetRedfield,
                prepared(
                    "four_level_degenerate_driven",
                    GeneratorKind::FloquetRedfield,
                ),
            ),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generators_preserve_trace_and_hermiticity(seed in any::<u64>(), t in 0.0f64..20.0) {
        for (kind, g) in all_generators() {
            let rho = random_hermitian_unit_trace(g.dim(), seed);
            let out = g.apply(t, &rho);
            prop_assert!(out.trace().norm() < 1e-11, "{kind:?}: trace {}", out.trace());
            let defect = (&out - out.adjoint()).norm();
            prop_assert!(defect < 1e-10, "{kind:?}: hermiticity defect {defect}");
        }
    }
}

#[test]
fn zero_coupling_reduces_to_coherent_part() {
    let bath = BathSpec {
        name: "h".into(),
        beta: 1.0,
        spectral: SpectralDensity::Ohmic {
            j0: 0.0,
            omega_cutoff: 1.0,
        },
        transitions: vec![(0, 1)],
        dipoles: None,
    };
    let h0 = diag(&[0.0, 1.3]);
    let ham = floqdyn_core::floquet::DrivenHamiltonian::new(h0.clone(), None);
    let spec = GeneratorSpec::new(
        GeneratorKind::Lindblad,
        ham,
        vec![CouplingChannel::sigma_pairs(&bath, 2).unwrap()],
    );
    let g = lindblad_generator(&spec).unwrap();
    assert!((g.static_superoperator().unwrap() - hamiltonian_part(&h0)).norm() < 1e-15);
}

fn with_mu(name: &str, kind: GeneratorKind, mu: f64) -> ScenarioConfig {
    let mut c = preset(name).unwrap();
    c.method.kind = kind;
    if let Some(d) = c.drive.as_mut() {
        d.mu = mu;
    }
    c
}

fn undriven(mut c: ScenarioConfig, kind: GeneratorKind) -> ScenarioConfig {
    c.drive = None;
    c.method.kind = kind;
    c
}

#[test]
fn floquet_lindblad_continuity_at_zero_drive() {
    let c = with_mu("three_level_v0", GeneratorKind::FloquetLindblad, 0.0);
    let fl = prepare(&c, IntegrationPlan::new(&c, 1.0, None, None).unwrap())
        .unwrap()
        .generator;
    let s = undriven(c.clone(), GeneratorKind::Lindblad);
    let l = prepare(&s, IntegrationPlan::new(&s, 1.0, None, None).unwrap())
        .unwrap()
        .generator;
    let diff = (fl.static_superoperator().unwrap() - l.static_superoperator().unwrap()).norm();
    assert!(diff < 1e-8, "generator difference {diff}");
}

#[test]
fn floquet_redfield_continuity_at_zero_drive() {
    let c = with_mu(
        "four_level_nondegenerate_driven",
        GeneratorKind::FloquetRedfield,
        0.0,
    );
    let fr = prepare(&c, IntegrationPlan::new(&c, 1.0, None, None).unwrap())
        .unwrap()
        .generator;
    let s = undriven(c.clone(), GeneratorKind::Redfield);
    let r = prepare(&s, IntegrationPlan::new(&s, 1.0, None, None).unwrap())
        .unwrap()
        .generator;
    let tau = fr.period().unwrap();
    for k in 0..7 {
        let t = k as f64 * tau / 7.0;
        let diff = (fr.superoperator_at(t) - r.static_superoperator().unwrap()).norm();
        assert!(diff < 1e-6, "t = {t}: generator difference {diff}");
    }
    // trajectories over a few periods from a coherent start
    let mut a = c.clone();
    let mut b = s.clone();
    let start = InitialState::Matrix {
        re: vec![
            vec![0.5, 0.0, 0.0, 0.2],
            vec![0.0; 4],
            vec![0.0; 4],
            vec![0.2, 0.0, 0.0, 0.5],
        ],
        im: None,
    };
    a.initial_state = start.clone();
    b.initial_state = start;
    let t_final = 5.0 * tau;
    let dt = tau / 200.0;
    let ta = evolve(&a, t_final, Some(dt), Some(50)).unwrap();
    let tb = evolve(&b, t_final, Some(dt), Some(50)).unwrap();
    let dist = max_trace_distance(&ta, &tb);
    assert!(
        dist < 1e-6,
        "trace distance {dist}, records {} vs {}",
        ta.times.len(),
        tb.times.len()
    );
}

#[test]
fn branch_gauge_invariance() {
    let mut c = preset("three_level_v0").unwrap();
    let plan = IntegrationPlan::new(&c, 1.0, None, None).unwrap();
    let unfolded = prepare(&c, plan).unwrap().generator;
    c.method.branch = Branch::Principal;
    let principal = prepare(&c, plan).unwrap().generator;
    let diff = (unfolded.static_superoperator().unwrap()
        - principal.static_superoperator().unwrap())
    .norm();
    assert!(diff < 1e-6, "branch difference {diff}");
}

#[test]
fn static_lamb_commutes_with_h0() {
    let c = preset("three_level_nondriven").unwrap();
    let g = prepare(&c, IntegrationPlan::new(&c, 1.0, None, None).unwrap())
        .unwrap()
        .generator;
    for (_, l) in &g.lamb_hamiltonians {
        assert!(commutator(l, &c.h0()).norm() < 1e-9);
        assert!(l.norm() > 0.0);
    }
}

#[test]
fn floquet_lamb_commutes_with_hbar_not_h0() {
    let c = preset("three_level_v0").unwrap();
    let p = prepare(&c, IntegrationPlan::new(&c, 1.0, None, None).unwrap()).unwrap();
    let hbar = &p.decomposition.as_ref().unwrap().hbar_floquet;
    let total = p
        .generator
        .lamb_hamiltonians
        .iter()
        .fold(Operator::zeros(3, 3), |a, (_, l)| a + l);
    assert!(commutator(&total, hbar).norm() < 1e-8);
    assert!(commutator(&total, &c.h0()).norm() > 1e-3);
}

/// Floquet-Redfield restricted to ω′ = ω without principal-value terms equals
/// Floquet-Lindblad with the collective couplings ½(Y + Y†), (i/2)(Y − Y†),
/// Y = Σ μ_ij σ_ij, and J(x) = x³/(6π²).
#[test]
fn full_secular_redfield_equals_floquet_lindblad() {
    let mut c = preset("four_level_degenerate_driven").unwrap();
    for b in &mut c.baths {
        b.spectral = SpectralDensity::Cubic {
            prefactor: 1.0 / (6.0 * PI * PI),
        };
    }
    c.method = MethodConfig {
        kind: GeneratorKind::FloquetRedfield,
        lamb_shift: false,
        secular: SecularMode::Full,
        fourier_floor: 0.0,
        q_max: 12,
        ..MethodConfig::default()
    };
    let plan = IntegrationPlan::new(&c, 1.0, None, None).unwrap();
    let decomp = Arc::new(decompose(&c, plan.floquet_samples.unwrap()).unwrap());
    let mut fr_spec = generator_spec(&c, Some(decomp.clone())).unwrap();
    fr_spec.period_nodes = 2 * plan.steps_per_period.unwrap();
    let fr = floquet_redfield_generator(&fr_spec).unwrap();

    let d = c.dim();
    let channels: Vec<CouplingChannel> = fr_spec
        .channels
        .iter()
        .map(|ch| {
            let y = ch
                .lowering_free_transitions(&c.h0())
                .unwrap()
                .into_iter()
                .fold(Operator::zeros(d, d), |acc, (s, mu)| acc + s * c_(mu));
            let sx = (&y + y.adjoint()) * c_(0.5);
            let sy = (&y - y.adjoint()) * (I * 0.5);
            CouplingChannel {
                operators: vec![sx, sy],
                ..ch.clone()
            }
        })
        .collect();
    let mut fl_spec = fr_spec.clone();
    fl_spec.kind = GeneratorKind::FloquetLindblad;
    fl_spec.channels = channels;
    let fl = floquet_lindblad_generator(&fl_spec).unwrap();
    let li = fl.static_superoperator().unwrap();

    let ham = c.hamiltonian();
    let tau = decomp.tau;
    let m = decomp.grid_len();
    let nodes = fr_spec.period_nodes;
    for k in [0, 17, nodes / 3, nodes - 1] {
        let t = k as f64 * tau / nodes as f64;
        let p = decomp.periodic_operator_at_index(k * (m / nodes));
        // ρ ↦ PρP† and its inverse
        let fwd: SuperOp = sandwich(p, &p.adjoint());
        let back: SuperOp = sandwich(&p.adjoint(), p);
        let expect = &fwd * li * &back;
        let got = fr.superoperator_at(t) - hamiltonian_part(&ham.at(t));
        let rel = (&got - &expect).norm() / expect.norm();
        assert!(rel < 1e-10, "node {k}: relative difference {rel}");
    }
}

fn c_(x: f64) -> floqdyn_core::C64 {
    c(x)
}

fn qubit(kind: GeneratorKind) -> ScenarioConfig {
    ScenarioConfig {
        labels: None,
        energies: vec![0.0, 0.5],
        target_level: 1,
        drive: None,
        baths: vec![BathSpec {
            name: "cold".into(),
            beta: 0.25,
            spectral: SpectralDensity::Ohmic {
                j0: 4e-3,
                omega_cutoff: 0.2f64.sqrt(),
            },
            transitions: vec![(1, 0)],
            dipoles: None,
        }],
        method: MethodConfig {
            kind,
            lamb_shift: false,
            ..MethodConfig::default()
        },
        initial_state: InitialState::Matrix {
            re: vec![vec![0.3, 0.35], vec![0.35, 0.7]],
            im: Some(vec![vec![0.0, 0.2], vec![-0.2, 0.0]]),
        },
    }
}

#[test]
fn calibrated_qubit_redfield_matches_lindblad() {
    let l = evolve(&qubit(GeneratorKind::Lindblad), 500.0, None, Some(20)).unwrap();
    let r = evolve(&qubit(GeneratorKind::Redfield), 500.0, None, Some(20)).unwrap();
    let d = max_trace_distance(&l, &r);
    assert!(d < 1e-4, "trace distance {d}");
    // and the state actually relaxed
    assert!((l.final_state()[(1, 1)].re - 0.7).abs() > 0.1);
}

#[test]
fn redfield_degenerate_generates_coherence() {
    let mut c = preset("four_level_degenerate").unwrap();
    c.method.lamb_shift = false;
    let t = evolve(&c, 200.0, None, None).unwrap();
    assert!(t.coherence(1, 2)[0] == 0.0);
    assert!(*t.coherence(1, 2).last().unwrap() > 1e-3);
}

#[test]
fn dipole_is_required_per_transition() {
    let mut c = preset("four_level_degenerate").unwrap();
    c.baths[0].dipoles = Some(vec![1.0]);
    assert!(c.validate().is_err());
    let ch = CouplingChannel {
        dipoles: Some(vec![1.0]),
        ..CouplingChannel::sigma_pairs(&preset("four_level_degenerate").unwrap().baths[0], 4)
            .unwrap()
    };
    assert!(ch.lowering_free_transitions(&c.h0()).is_err());
}

#[test]
fn redfield_grid_must_divide_floquet_samples() {
    let c = preset("four_level_degenerate_driven").unwrap();
    let plan = IntegrationPlan::new(&c, 1.0, None, None).unwrap();
    let decomp = Arc::new(decompose(&c, plan.floquet_samples.unwrap()).unwrap());
    let mut spec = generator_spec(&c, Some(decomp)).unwrap();
    spec.period_nodes = 7;
    assert!(matches!(
        floquet_redfield_generator(&spec),
        Err(floqdyn_core::Error::Numerical(_))
    ));
}

#[test]
fn floored_channel_is_rejected() {
    let c = preset("three_level_v0").unwrap();
    let plan = IntegrationPlan::new(&c, 1.0, None, None).unwrap();
    let decomp = Arc::new(decompose(&c, plan.floquet_samples.unwrap()).unwrap());
    let mut spec = generator_spec(&c, Some(decomp)).unwrap();
    spec.fourier_floor = 10.0;
    assert!(floquet_lindblad_generator(&spec).is_err());
    let _ = ket_bra(2, 0, 1);
}

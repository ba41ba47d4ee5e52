mod common;

use floqdyn_core::bath::{
    gamma, redfield_coefficients, spectral_density, thermal_occupation, LambIntegralParams,
    OhmicSpec, SpectralDensity,
};
use floqdyn_core::floquet::{fourier_operator_coefficients, jump_operator_table, DriveSpec};
use floqdyn_core::operator::{
    hermitian_part, principal_unitary_log, unitarity_defect, unitary_fidelity,
    unitary_from_hermitian, Operator, C64,
};
use floqdyn_core::scenarios::{decompose, preset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hermitian(d: usize, seed: u64, scale: f64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Operator::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    hermitian_part(&a) * C64::new(scale, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_group_law(seed in any::<u64>(), d in 2usize..6, t1 in -5.0f64..5.0, t2 in -5.0f64..5.0) {
        let h = hermitian(d, seed, 2.0);
        let lhs = unitary_from_hermitian(&h, t1).unwrap() * unitary_from_hermitian(&h, t2).unwrap();
        let rhs = unitary_from_hermitian(&h, t1 + t2).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn principal_log_inverts_exponential(seed in any::<u64>(), d in 2usize..6) {
        let mut k = hermitian(d, seed, 1.0);
        // keep the spectral radius below π
        let radius = k.norm();
        if radius >= 3.0 {
            k *= C64::new(3.0 / radius, 0.0);
        }
        let u = unitary_from_hermitian(&k, 1.0).unwrap();
        let back = principal_unitary_log(&u).unwrap();
        prop_assert!((back - k).norm() < 1e-8);
    }

    #[test]
    fn fidelity_symmetric_and_phase_blind(a in any::<u64>(), b in any::<u64>(), phi in -3.0f64..3.0) {
        let u = unitary_from_hermitian(&hermitian(3, a, 1.0), 1.0).unwrap();
        let v = unitary_from_hermitian(&hermitian(3, b, 1.0), 1.0).unwrap();
        let f = unitary_fidelity(&u, &v).unwrap();
        prop_assert!((f - unitary_fidelity(&v, &u).unwrap()).abs() < 1e-12);
        let shifted = &u * C64::from_polar(1.0, phi);
        prop_assert!((f - unitary_fidelity(&shifted, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn detailed_balance(x in 0.01f64..8.0, beta in 0.02f64..5.0, j0 in 1e-5f64..1e-2, wc in 0.2f64..3.0) {
        let s = SpectralDensity::Ohmic { j0, omega_cutoff: wc };
        let up = gamma(&s, beta, -x);
        let down = gamma(&s, beta, x);
        prop_assume!(down > 1e-300);
        let ratio = up / down;
        let expect = (beta * x).exp();
        prop_assert!(((ratio - expect) / expect).abs() < 1e-9, "ratio {ratio} vs {expect}");
        prop_assert!(up >= 0.0 && down >= 0.0);
    }

    #[test]
    fn spectral_density_is_odd(x in -10.0f64..10.0, j0 in 1e-5f64..1e-2, wc in 0.2f64..3.0) {
        let spec = OhmicSpec { j0, omega_cutoff: wc };
        prop_assert_eq!(spectral_density(&spec, -x), -spectral_density(&spec, x));
    }

    #[test]
    fn occupation_reflection(x in 0.001f64..20.0, beta in 0.01f64..5.0) {
        let plus = thermal_occupation(x, beta).unwrap();
        let minus = thermal_occupation(-x, beta).unwrap();
        prop_assert!((minus + plus + 1.0).abs() < 1e-12 * plus.max(1.0));
    }
}

#[test]
fn redfield_occupations_vanish_continuously_at_zero() {
    // x³n̄(x) = x²/β − x³/2 + O(x⁴), so N1 → 0 quadratically
    let lamb = LambIntegralParams::default();
    let beta = 0.25;
    assert_eq!(redfield_coefficients(0.0, beta, &lamb).unwrap().n1, 0.0);
    for x in [1e-6, -1e-6, 1e-4, -1e-4] {
        let k = redfield_coefficients(x, beta, &lamb).unwrap();
        let series = x * x / beta - x * x * x / 2.0;
        assert!(
            (k.n1 - series).abs() < 1e-3 * series.abs(),
            "N1({x}) = {}",
            k.n1
        );
        assert!((k.n2 - k.n1 - x * x * x).abs() < 1e-12 * series.abs());
    }
}

#[test]
fn principal_value_window_independence() {
    let base = LambIntegralParams::default();
    for x in [0.5, 2.5, 3.0] {
        let reference = redfield_coefficients(x, 0.25, &base).unwrap();
        for w in [base.pv_window * 0.5, base.pv_window * 2.0] {
            let p = LambIntegralParams {
                pv_window: w,
                ..base
            };
            let k = redfield_coefficients(x, 0.25, &p).unwrap();
            let rel = ((k.c1_imag - reference.c1_imag) / reference.c1_imag).abs();
            assert!(rel < 1e-7, "x = {x}, window {w}: relative change {rel}");
        }
    }
}

fn driven_three_level(
    mu: f64,
    pair: (usize, usize),
    omega: f64,
) -> floqdyn_core::scenarios::ScenarioConfig {
    let mut c = preset("three_level_v0").unwrap();
    c.drive = Some(DriveSpec {
        mu,
        omega_drive: omega,
        pair,
    });
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn floquet_decomposition_invariants(mu in 0.0f64..0.3, pick in 0usize..2, omega in 1.5f64..3.5) {
        let pair = [(0, 2), (1, 2)][pick];
        let c = driven_three_level(mu, pair, omega);
        let f = decompose(&c, 512).unwrap();
        for (_, p) in &f.p_samples {
            prop_assert!(unitarity_defect(p) < 1e-7);
        }
        let id = Operator::identity(3, 3);
        prop_assert!((&f.p_samples[0].1 - id).norm() < 1e-7);
        let u_tau = f.monodromy();
        let expect = unitary_from_hermitian(&f.hbar_floquet, f.tau).unwrap();
        prop_assert!(unitary_fidelity(u_tau, &expect).unwrap() >= 1.0 - 1e-6);

        for (i, j) in [(1usize, 0usize), (1, 2)] {
            let s = Operator::from_fn(3, 3, |a, b| {
                if (a, b) == (i, j) || (a, b) == (j, i) { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) }
            });
            let fset = fourier_operator_coefficients(&f, &s, 24, 1e-3).unwrap();
            for (q, sq) in fset.iter() {
                let partner = fset.get(-q).expect("symmetric support");
                prop_assert!((sq.adjoint() - partner).norm() < 1e-6);
            }
            let table = jump_operator_table(&fset, &f.quasi, 1e-4);
            for (q, sq) in fset.iter() {
                prop_assert!((table.sum_over_gaps(q, 3) - sq).norm() < 1e-8);
            }
            for (q, w, e) in table.iter() {
                let partner = table.entry(-q, -w).expect("mirrored entry");
                prop_assert!((e.adjoint() - partner).norm() < 1e-8);
            }
        }
    }
}

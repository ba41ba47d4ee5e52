#![allow(dead_code)]

use floqdyn_core::operator::{c, trace_distance, Operator, C64};
use floqdyn_core::scenarios::Trajectory;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// AA†/Tr(AA†) for a complex Gaussian-ish A drawn from `seed`.
pub fn random_density(d: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Operator::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let r = &a * a.adjoint();
    let tr = r.trace();
    r / tr
}

/// Hermitian unit-trace matrix that need not be positive.
pub fn random_hermitian_unit_trace(d: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Operator::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = (&a + a.adjoint()) * c(0.5);
    let tr = h.trace().re;
    let shift = (1.0 - tr) / d as f64;
    h + Operator::identity(d, d) * c(shift)
}

/// Largest trace distance between two trajectories over the record times
/// they share.
pub fn max_trace_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut worst = 0.0f64;
    let mut shared = 0;
    for (t, x) in a.times.iter().zip(&a.states) {
        if let Some(k) = b
            .times
            .iter()
            .position(|s| (s - t).abs() < 1e-9 * t.abs().max(1.0))
        {
            worst = worst.max(trace_distance(x, &b.states[k]));
            shared += 1;
        }
    }
    assert!(shared >= 2, "trajectories share {shared} record times");
    worst
}

use super::config::ScenarioConfig;
use super::evolve::{decompose, generator_spec, IntegrationPlan};
use crate::error::{Error, Result};
use crate::floquet::{
    benchmark_fidelities, cluster_gaps, fourier_operator_coefficients, jump_operator_table,
    magnus_bch_propagator, propagate_schrodinger, BenchmarkReport,
};
use crate::generators::{floquet_lindblad_generator, GeneratorKind};
use crate::operator::Operator;
use std::collections::HashMap;
use std::sync::Arc;

/// Magnus order and BCH truncation used by [`fidelity_benchmark`].
pub const MAGNUS_ORDER: usize = 3;
pub const BCH_TERMS: usize = 12;
/// Reference RK4 steps per period.
pub const REFERENCE_STEPS_PER_PERIOD: usize = 4000;

/// Floquet Hamiltonian, quasienergy gaps, populated harmonics and Lamb-shift
/// Hamiltonians of a driven scenario.
#[derive(Debug, Clone)]
pub struct FloquetReport {
    pub tau: f64,
    pub hbar: Operator,
    /// Ascending.
    pub quasienergies: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Bath name and the (q_min, q_max) of its non-vanishing jump operators.
    pub q_ranges: Vec<(String, Option<(i64, i64)>)>,
    /// Floquet-Lindblad Lamb Hamiltonian per bath.
    pub lamb: Vec<(String, Operator)>,
}

pub fn floquet_report(config: &ScenarioConfig) -> Result<FloquetReport> {
    config.validate()?;
    if config.drive.is_none() {
        return Err(Error::Config(
            "Floquet analysis needs a driven scenario".into(),
        ));
    }
    let mut fl = config.clone();
    fl.method.kind = GeneratorKind::FloquetLindblad;
    let plan = IntegrationPlan::new(&fl, 1.0, None, None)?;
    let samples = plan
        .floquet_samples
        .expect("driven plans carry a Floquet grid");
    let decomp = Arc::new(decompose(&fl, samples)?);
    let mut spec = generator_spec(&fl, Some(decomp.clone()))?;
    spec.lamb_shift = true;
    let gen = floquet_lindblad_generator(&spec)?;

    let mut q_ranges = Vec::with_capacity(spec.channels.len());
    for ch in &spec.channels {
        let mut range: Option<(i64, i64)> = None;
        for s in &ch.operators {
            let f = fourier_operator_coefficients(&decomp, s, spec.q_max, spec.fourier_floor)?;
            if let Some((lo, hi)) = jump_operator_table(&f, &decomp.quasi, spec.gap_tol).q_range() {
                range = Some(range.map_or((lo, hi), |(a, b)| (a.min(lo), b.max(hi))));
            }
        }
        q_ranges.push((ch.bath.name.clone(), range));
    }
    let quasienergies = decomp.quasi.eigenvalues.clone();
    let (gaps, _) = cluster_gaps(&quasienergies, spec.gap_tol);
    Ok(FloquetReport {
        tau: decomp.tau,
        hbar: decomp.hbar_floquet.clone(),
        quasienergies,
        gaps,
        q_ranges,
        lamb: gen.lamb_hamiltonians,
    })
}

/// Magnus+BCH propagator against fine-step RK4 on `points` times in [0, τ],
/// with the periodicity of both implied periodic operators over two periods.
pub fn fidelity_benchmark(config: &ScenarioConfig, points: usize) -> Result<BenchmarkReport> {
    config.validate()?;
    let drive = config
        .drive
        .ok_or_else(|| Error::Config("the fidelity benchmark needs a driven scenario".into()))?;
    let mut fl = config.clone();
    fl.method.kind = GeneratorKind::FloquetLindblad;
    let plan = IntegrationPlan::new(&fl, 1.0, None, None)?;
    let decomp = decompose(&fl, plan.floquet_samples.expect("driven"))?;
    let ham = config.hamiltonian();
    let h0 = config.h0();
    let tau = drive.tau();
    // the benchmark samples t_k = τk/(n−1) and t_k + τ
    let n = points.max(2);
    let mut times: Vec<f64> = (0..n)
        .flat_map(|k| {
            let t = tau * k as f64 / (n - 1) as f64;
            [t, t + tau]
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut approx_at = HashMap::with_capacity(times.len());
    let mut exact_at = HashMap::with_capacity(times.len());
    let mut u = Operator::identity(h0.nrows(), h0.nrows());
    let mut prev = 0.0;
    for &s in &times {
        let m = magnus_bch_propagator(&drive, &h0, s, MAGNUS_ORDER, BCH_TERMS)?;
        approx_at.insert(s.to_bits(), m.propagator);
        if s > prev {
            let steps = ((s - prev) / tau * REFERENCE_STEPS_PER_PERIOD as f64).ceil() as usize;
            u = propagate_schrodinger(&|x| ham.at(x), prev, s, steps.max(1))? * u;
            prev = s;
        }
        exact_at.insert(s.to_bits(), u.clone());
    }
    let approx = |t: f64| approx_at[&t.to_bits()].clone();
    let exact = |t: f64| exact_at[&t.to_bits()].clone();
    Ok(benchmark_fidelities(&decomp, &exact, &approx, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::preset;

    #[test]
    fn undriven_limit() {
        let mut c = preset("three_level_v1").unwrap();
        c.drive.as_mut().unwrap().mu = 0.0;
        let r = floquet_report(&c).unwrap();
        assert!((&r.hbar - c.h0()).norm() < 1e-9);
        for (_, q) in &r.q_ranges {
            assert_eq!(*q, Some((0, 0)));
        }
        assert_eq!(r.lamb.len(), 2);
        assert!(floquet_report(&preset("three_level_nondriven").unwrap()).is_err());
    }

    #[test]
    fn benchmark_grid_covers_period() {
        let c = preset("three_level_v0").unwrap();
        let b = fidelity_benchmark(&c, 5).unwrap();
        assert_eq!(b.times.len(), 5);
        assert!((b.propagator_fidelity[0] - 1.0).abs() < 1e-12);
        assert!(b.min_periodicity_exact() > 1.0 - 1e-6);
    }
}

use super::evolve::Trajectory;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub eta: f64,
    pub t_final: f64,
    /// (t, ρ_bb(t)) pairs the average was taken over.
    pub integrand: Vec<(f64, f64)>,
}

/// η = (1/t_f)∫_0^{t_f} ρ_bb(s) ds by the trapezoidal rule on the recorded
/// grid, closing the last interval by linear interpolation.
pub fn efficiency(traj: &Trajectory, target: usize, t_final: f64) -> Result<EfficiencyReport> {
    if target >= traj.dim() {
        return Err(Error::Validation(format!(
            "target level {target} out of range"
        )));
    }
    let end = traj.t_end();
    if !(t_final > 0.0) || t_final > end * (1.0 + 1e-12) {
        return Err(Error::Validation(format!(
            "t_final {t_final} outside the trajectory span (0, {end}]"
        )));
    }
    let p = traj.population(target);
    let mut integrand = Vec::new();
    let mut acc = 0.0;
    for k in 0..p.len() {
        let t = traj.times[k];
        if t > t_final {
            let (t0, p0) = integrand.last().copied().expect("times start at zero");
            let th = (t_final - t0) / (t - t0);
            let pf = p0 + th * (p[k] - p0);
            acc += 0.5 * (p0 + pf) * (t_final - t0);
            integrand.push((t_final, pf));
            break;
        }
        if let Some(&(t0, p0)) = integrand.last() {
            acc += 0.5 * (p0 + p[k]) * (t - t0);
        }
        integrand.push((t, p[k]));
    }
    Ok(EfficiencyReport {
        eta: acc / t_final,
        t_final,
        integrand,
    })
}

/// η(t_k) at every recorded time, with η(0) = ρ_bb(0).
pub fn cumulative_efficiency(traj: &Trajectory, target: usize) -> Vec<f64> {
    let p = traj.population(target);
    let mut out = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for k in 0..p.len() {
        if k == 0 {
            out.push(p[0]);
            continue;
        }
        acc += 0.5 * (p[k - 1] + p[k]) * (traj.times[k] - traj.times[k - 1]);
        out.push(acc / traj.times[k]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub min_eigenvalue: f64,
    pub min_eigenvalue_series: Vec<f64>,
    pub max_trace_drift: f64,
    /// max_t |ρ_ij(t)| for i < j.
    pub max_coherences: Vec<((usize, usize), f64)>,
    /// ‖ρ(t_k) − ρ(t_{k−1})‖ (Frobenius), zero at the first record.
    pub stationarity: Vec<f64>,
    pub final_stationarity: f64,
}

pub fn trajectory_diagnostics(traj: &Trajectory) -> DiagnosticsReport {
    let d = traj.dim();
    let mut max_coherences = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let m = traj.coherence(i, j).into_iter().fold(0.0, f64::max);
            max_coherences.push(((i, j), m));
        }
    }
    let stationarity: Vec<f64> = std::iter::once(0.0)
        .chain(traj.states.windows(2).map(|w| (&w[1] - &w[0]).norm()))
        .collect();
    DiagnosticsReport {
        min_eigenvalue: traj
            .positivity_log
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        min_eigenvalue_series: traj.positivity_log.clone(),
        max_trace_drift: traj
            .states
            .iter()
            .map(|r| (r.trace() - 1.0).norm())
            .fold(0.0, f64::max),
        max_coherences,
        final_stationarity: *stationarity.last().expect("non-empty"),
        stationarity,
    }
}

use crate::config::{Format, RunConfig, SweepConfig};
use crate::error::{CliError, Result, EXIT_CONFIG, EXIT_OK};
use crate::output::{num, table_csv, trajectory_csv, Bundle, MatrixJson};
use floqdyn_core::operator::{c, trace_distance};
use floqdyn_core::scenarios::{
    cumulative_efficiency, efficiency, evolve, fidelity_benchmark, floquet_report,
    trajectory_diagnostics, Trajectory,
};
use floqdyn_core::Operator;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use std::path::Path;

/// Sample points of the fidelity benchmark.
pub const BENCHMARK_POINTS: usize = 101;

pub fn run_trajectory(rc: &RunConfig) -> Result<Trajectory> {
    Ok(evolve(
        &rc.scenario,
        rc.t_final()?,
        rc.integration.dt,
        rc.integration.stride,
    )?)
}

#[derive(Debug, Serialize)]
pub struct Coherence {
    pub i: usize,
    pub j: usize,
    pub max_abs: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub label: Option<String>,
    pub kind: String,
    pub target_level: usize,
    pub t_final: f64,
    pub t_end: f64,
    pub eta: f64,
    pub final_state: MatrixJson,
    pub final_populations: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_trace_drift: f64,
    pub max_coherences: Vec<Coherence>,
    pub final_stationarity: f64,
    pub records: usize,
    pub warnings: Vec<String>,
}

pub fn simulation_summary(rc: &RunConfig, traj: &Trajectory) -> Result<SimulationSummary> {
    let t_final = rc.t_final()?;
    let target = rc.scenario.target_level;
    let eta = efficiency(traj, target, t_final)?.eta;
    let diag = trajectory_diagnostics(traj);
    let fin = traj.final_state();
    Ok(SimulationSummary {
        label: rc.preset.clone(),
        kind: traj.kind.name().to_owned(),
        target_level: target,
        t_final,
        t_end: traj.t_end(),
        eta,
        final_state: fin.into(),
        final_populations: (0..fin.nrows()).map(|k| fin[(k, k)].re).collect(),
        min_eigenvalue: diag.min_eigenvalue,
        max_trace_drift: diag.max_trace_drift,
        max_coherences: diag
            .max_coherences
            .into_iter()
            .map(|((i, j), m)| Coherence { i, j, max_abs: m })
            .collect(),
        final_stationarity: diag.final_stationarity,
        records: traj.times.len(),
        warnings: traj.warnings.clone(),
    })
}

pub fn simulate(rc: &RunConfig, out: &Path) -> Result<SimulationSummary> {
    let traj = run_trajectory(rc)?;
    let summary = simulation_summary(rc, &traj)?;
    let mut b = Bundle::default();
    if rc.outputs.wants(Format::Csv) {
        b.add(
            "trajectory.csv",
            trajectory_csv(&traj, rc.scenario.target_level),
        );
    }
    if rc.outputs.wants(Format::Json) {
        b.add_json("summary.json", &summary);
    }
    b.write(out)?;
    Ok(summary)
}

#[derive(Debug, Serialize)]
pub struct QRange {
    pub bath: String,
    pub q_min: Option<i64>,
    pub q_max: Option<i64>,
}

#[derive(Debug, Serialize)]
pub struct LambJson {
    pub bath: String,
    pub matrix: MatrixJson,
}

#[derive(Debug, Serialize)]
pub struct FloquetSummary {
    pub tau: f64,
    pub hbar: MatrixJson,
    pub quasienergies: Vec<f64>,
    pub gaps: Vec<f64>,
    pub q_ranges: Vec<QRange>,
    pub lamb_shift: Vec<LambJson>,
    pub min_propagator_fidelity: f64,
    /// Periodicity of the RK4-derived P(t, 0) over two periods.
    pub min_periodicity_fidelity: f64,
    /// The same for P(t, 0) built from the Magnus+BCH propagator.
    pub min_periodicity_fidelity_magnus: f64,
}

pub fn floquet(rc: &RunConfig, out: &Path) -> Result<FloquetSummary> {
    let report = floquet_report(&rc.scenario)?;
    let bench = fidelity_benchmark(&rc.scenario, BENCHMARK_POINTS)?;
    let summary = FloquetSummary {
        tau: report.tau,
        hbar: (&report.hbar).into(),
        quasienergies: report.quasienergies,
        gaps: report.gaps,
        q_ranges: report
            .q_ranges
            .into_iter()
            .map(|(bath, r)| QRange {
                bath,
                q_min: r.map(|x| x.0),
                q_max: r.map(|x| x.1),
            })
            .collect(),
        lamb_shift: report
            .lamb
            .iter()
            .map(|(bath, m)| LambJson {
                bath: bath.clone(),
                matrix: m.into(),
            })
            .collect(),
        min_propagator_fidelity: bench.min_propagator_fidelity(),
        min_periodicity_fidelity: bench.min_periodicity_exact(),
        min_periodicity_fidelity_magnus: bench.min_periodicity_approx(),
    };
    let mut b = Bundle::default();
    if rc.outputs.wants(Format::Json) {
        b.add_json("floquet.json", &summary);
    }
    if rc.outputs.wants(Format::Csv) {
        let rows: Vec<Vec<f64>> = (0..bench.times.len())
            .map(|k| {
                vec![
                    bench.times[k],
                    bench.propagator_fidelity[k],
                    bench.periodicity_exact[k],
                    bench.periodicity_approx[k],
                ]
            })
            .collect();
        b.add(
            "fidelity.csv",
            table_csv(
                &[
                    "t",
                    "propagator_fidelity",
                    "periodicity_fidelity",
                    "periodicity_fidelity_magnus",
                ],
                &rows,
            ),
        );
    }
    b.write(out)?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    EtaSeries,
    TraceDistance,
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub metric: Metric,
    pub t_final: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    /// η_b/η_a − 1.
    pub relative_gain: f64,
    pub max_trace_distance: f64,
    pub final_trace_distance: f64,
}

/// ρ(t) by linear interpolation between records.
fn state_at(traj: &Trajectory, t: f64) -> Operator {
    let k = traj.times.partition_point(|&s| s < t);
    if k == 0 {
        return traj.states[0].clone();
    }
    if k >= traj.times.len() {
        return traj.final_state().clone();
    }
    let (t0, t1) = (traj.times[k - 1], traj.times[k]);
    let th = (t - t0) / (t1 - t0);
    &traj.states[k - 1] * c(1.0 - th) + &traj.states[k] * c(th)
}

fn eta_at(times: &[f64], eta: &[f64], t: f64) -> f64 {
    let k = times.partition_point(|&s| s < t);
    if k == 0 {
        return eta[0];
    }
    if k >= times.len() {
        return *eta.last().expect("non-empty");
    }
    let th = (t - times[k - 1]) / (times[k] - times[k - 1]);
    eta[k - 1] + th * (eta[k] - eta[k - 1])
}

/// Both runs side by side on the record times of `a`, over the span both
/// cover.
pub fn compare(
    a: &RunConfig,
    b: &RunConfig,
    metric: Metric,
    out: &Path,
    formats: &[Format],
) -> Result<CompareSummary> {
    if a.scenario.dim() != b.scenario.dim() {
        return Err(CliError::Config(format!(
            "cannot compare a {}-level with a {}-level scenario",
            a.scenario.dim(),
            b.scenario.dim()
        )));
    }
    if a.scenario.target_level != b.scenario.target_level {
        return Err(CliError::Config(
            "the runs have different target levels".into(),
        ));
    }
    let (ta, tb) = rayon::join(|| run_trajectory(a), || run_trajectory(b));
    let (ta, tb) = (ta?, tb?);
    let t_final = a.t_final()?.min(b.t_final()?);
    let target = a.scenario.target_level;
    let eta_a = efficiency(&ta, target, t_final)?.eta;
    let eta_b = efficiency(&tb, target, t_final)?.eta;
    let cum_a = cumulative_efficiency(&ta, target);
    let cum_b = cumulative_efficiency(&tb, target);

    let mut rows = Vec::new();
    let mut max_td = 0.0f64;
    let mut final_td = 0.0;
    for (k, &t) in ta.times.iter().enumerate() {
        if t > t_final * (1.0 + 1e-12) {
            break;
        }
        let td = trace_distance(&ta.states[k], &state_at(&tb, t));
        max_td = max_td.max(td);
        final_td = td;
        rows.push(match metric {
            Metric::EtaSeries => {
                let eb = eta_at(&tb.times, &cum_b, t);
                let rel = if cum_a[k] != 0.0 {
                    eb / cum_a[k] - 1.0
                } else {
                    f64::NAN
                };
                vec![t, cum_a[k], eb, rel]
            }
            Metric::TraceDistance => vec![t, td],
        });
    }
    // close the series at t_final itself
    let last = ta.times.partition_point(|&t| t <= t_final * (1.0 + 1e-12));
    if last > 0 && ta.times[last - 1] < t_final {
        let td = trace_distance(&state_at(&ta, t_final), &state_at(&tb, t_final));
        max_td = max_td.max(td);
        final_td = td;
        rows.push(match metric {
            Metric::EtaSeries => vec![t_final, eta_a, eta_b, eta_b / eta_a - 1.0],
            Metric::TraceDistance => vec![t_final, td],
        });
    }
    let summary = CompareSummary {
        metric,
        t_final,
        eta_a,
        eta_b,
        relative_gain: eta_b / eta_a - 1.0,
        max_trace_distance: max_td,
        final_trace_distance: final_td,
    };
    let mut bundle = Bundle::default();
    if formats.contains(&Format::Csv) {
        let header: &[&str] = match metric {
            Metric::EtaSeries => &["t", "eta_a", "eta_b", "relative_difference"],
            Metric::TraceDistance => &["t", "trace_distance"],
        };
        bundle.add("compare.csv", table_csv(header, &rows));
    }
    if formats.contains(&Format::Json) {
        bundle.add_json("compare.json", &summary);
    }
    bundle.write(out)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub values: Vec<Value>,
    pub status: String,
    pub error_code: i32,
    pub eta: Option<f64>,
    pub final_populations: Vec<f64>,
    pub min_eigenvalue: Option<f64>,
}

fn sweep_point(s: &SweepConfig, values: &[Value]) -> SweepRow {
    let run = || -> Result<SimulationSummary> {
        let rc = s.point_config(values)?;
        let traj = run_trajectory(&rc)?;
        simulation_summary(&rc, &traj)
    };
    match run() {
        Ok(sum) => SweepRow {
            values: values.to_vec(),
            status: "ok".into(),
            error_code: EXIT_OK,
            eta: Some(sum.eta),
            final_populations: sum.final_populations,
            min_eigenvalue: Some(sum.min_eigenvalue),
        },
        Err(e) => SweepRow {
            values: values.to_vec(),
            status: e.to_string(),
            error_code: e.exit_code(),
            eta: None,
            final_populations: vec![],
            min_eigenvalue: None,
        },
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn value_field(v: &Value) -> String {
    match v {
        Value::String(s) => csv_field(s),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), num),
        other => csv_field(&other.to_string()),
    }
}

pub fn sweep_csv(s: &SweepConfig, rows: &[SweepRow]) -> String {
    let d = rows
        .iter()
        .map(|r| r.final_populations.len())
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = s.axes.iter().map(|a| csv_field(&a.name)).collect();
    header.extend(["status", "error_code", "eta", "min_eigenvalue"].map(String::from));
    header.extend((0..d).map(|k| format!("p_{k}")));
    let mut out = header.join(",");
    out.push('\n');
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for r in rows {
        let mut f: Vec<String> = r.values.iter().map(value_field).collect();
        f.push(csv_field(&r.status));
        f.push(r.error_code.to_string());
        f.push(opt(r.eta));
        f.push(opt(r.min_eigenvalue));
        for k in 0..d {
            f.push(opt(r.final_populations.get(k).copied()));
        }
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub axes: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Runs every grid point, in parallel up to `workers`; returns the rows in
/// grid order and the exit code (non-zero only if every point failed).
pub fn sweep(s: &SweepConfig, out: &Path) -> Result<(Vec<SweepRow>, i32)> {
    s.validate()?;
    let points = s.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> =
        pool.install(|| points.par_iter().map(|p| sweep_point(s, p)).collect());
    let code = if rows.iter().all(|r| r.error_code != EXIT_OK) {
        rows.iter()
            .map(|r| r.error_code)
            .max()
            .unwrap_or(EXIT_CONFIG)
    } else {
        EXIT_OK
    };
    let mut b = Bundle::default();
    if s.outputs.wants(Format::Csv) {
        b.add("sweep.csv", sweep_csv(s, &rows));
    }
    if s.outputs.wants(Format::Json) {
        b.add_json(
            "sweep.json",
            &SweepSummary {
                axes: s.axes.iter().map(|a| a.name.clone()).collect(),
                rows: rows.clone(),
            },
        );
    }
    b.write(out)?;
    Ok((rows, code))
}

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::floquet::{floquet_decompose, FloquetDecomposition, FloquetGrid};
use crate::generators::superop::{unvectorize, vectorize, SuperOp};
use crate::generators::{
    floquet_lindblad_generator, floquet_redfield_generator, lindblad_generator_interaction,
    redfield_generator, Generator, GeneratorKind, GeneratorSpec, Picture,
};
use crate::operator::{
    c, hermitian_eigensystem, hermitian_part, identity, min_eigenvalue, Operator, Spectrum, C64,
};
use std::sync::Arc;

/// RK4 steps per drive period unless a step is given.
pub const STEPS_PER_PERIOD: usize = 200;
/// Step for undriven runs unless a step is given.
pub const DEFAULT_STATIC_DT: f64 = 0.05;
/// Upper bound on the number of recorded states for the default stride.
pub const MAX_RECORDS: usize = 20_000;
/// Trace drift beyond which integration is abandoned.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Negativity beyond which a Redfield-type run gets a warning.
pub const REDFIELD_NEGATIVITY_WARNING: f64 = -1e-3;
/// Largest h·‖L‖∞ taken in one RK4 step; larger products are split into
/// substeps (static generators) or refine the period grid (periodic ones).
pub const STIFFNESS_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationPlan {
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    /// Steps per period for driven runs.
    pub steps_per_period: Option<usize>,
    /// Floquet samples per period for driven runs.
    pub floquet_samples: Option<usize>,
}

impl IntegrationPlan {
    /// For driven runs the step is snapped to τ/N, and the Floquet grid is a
    /// multiple of 2N so that every RK4 stage and recorded time is a grid node.
    pub fn new(
        config: &ScenarioConfig,
        t_final: f64,
        dt: Option<f64>,
        stride: Option<usize>,
    ) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::Config(format!(
                "t_final must be positive, got {t_final}"
            )));
        }
        if let Some(h) = dt {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {h}")));
            }
        }
        let (dt, per, samples) = match &config.drive {
            Some(d) => {
                let tau = d.tau();
                let n = dt.map_or(STEPS_PER_PERIOD, |h| {
                    (tau / h - 1e-9).ceil().max(1.0) as usize
                });
                let base = 2 * n;
                let samples = match config.method.floquet_samples {
                    Some(m) => {
                        if m == 0 || m % base != 0 {
                            return Err(Error::Config(format!(
                                "floquet_samples = {m} must be a multiple of {base} (twice the steps per period)"
                            )));
                        }
                        m
                    }
                    None => base * 1024usize.div_ceil(base),
                };
                (tau / n as f64, Some(n), Some(samples))
            }
            None => (dt.unwrap_or(DEFAULT_STATIC_DT), None, None),
        };
        let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
        let stride = match stride {
            Some(0) => return Err(Error::Config("stride must be at least 1".into())),
            Some(s) => s,
            None => steps.div_ceil(MAX_RECORDS - 1).max(1),
        };
        Ok(IntegrationPlan {
            dt,
            steps,
            stride,
            steps_per_period: per,
            floquet_samples: samples,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// The same plan with `n` steps per period (driven runs only).
    fn with_steps_per_period(
        config: &ScenarioConfig,
        n: usize,
        t_final: f64,
        stride: Option<usize>,
    ) -> Result<Self> {
        let tau = config.drive.map(|d| d.tau()).expect("driven plan");
        let mut c = config.clone();
        c.method.floquet_samples = None;
        IntegrationPlan::new(&c, t_final, Some(tau / n as f64 * (1.0 - 1e-12)), stride)
    }
}

/// max_i Σ_j |L_ij|, an upper bound on the spectral radius.
pub fn superop_inf_norm(l: &SuperOp) -> f64 {
    l.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Generator and cached data ready to integrate.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub plan: IntegrationPlan,
    pub generator: Generator,
    pub decomposition: Option<Arc<FloquetDecomposition>>,
    pub h0_spectrum: Spectrum,
}

pub fn decompose(config: &ScenarioConfig, samples: usize) -> Result<FloquetDecomposition> {
    let drive = config
        .drive
        .ok_or_else(|| Error::Config("Floquet analysis needs a driven scenario".into()))?;
    let ham = config.hamiltonian();
    let grid = FloquetGrid {
        samples,
        substeps: config.method.floquet_substeps.max(1),
    };
    let f = floquet_decompose(&|t| ham.at(t), drive.tau(), &config.h0(), grid)?;
    Ok(if f.branch == config.method.branch {
        f
    } else {
        f.with_branch(config.method.branch)
    })
}

pub fn generator_spec(
    config: &ScenarioConfig,
    decomposition: Option<Arc<FloquetDecomposition>>,
) -> Result<GeneratorSpec> {
    let m = &config.method;
    let mut spec = GeneratorSpec::new(m.kind, config.hamiltonian(), config.channels()?);
    spec.lamb_shift = m.lamb_shift;
    spec.floquet = decomposition;
    spec.lamb_params = m.lamb_params;
    spec.q_max = m.q_max;
    spec.fourier_floor = m.fourier_floor;
    spec.gap_tol = m.gap_tol;
    spec.secular = m.secular;
    Ok(spec)
}

/// Like [`prepare`], but refines the steps per period of a periodic
/// generator until h·‖L(t)‖∞ ≤ [`STIFFNESS_LIMIT`] at every node.
pub fn prepare_refined(
    config: &ScenarioConfig,
    t_final: f64,
    dt: Option<f64>,
    stride: Option<usize>,
) -> Result<Prepared> {
    let mut plan = IntegrationPlan::new(config, t_final, dt, stride)?;
    loop {
        let p = prepare(config, plan)?;
        let Some(tau) = p.generator.period() else {
            return Ok(p);
        };
        let n = plan
            .steps_per_period
            .expect("periodic generators are driven");
        let worst = (0..2 * n)
            .map(|k| {
                superop_inf_norm(
                    &p.generator
                        .superoperator_at(k as f64 * tau / (2 * n) as f64),
                )
            })
            .fold(0.0, f64::max);
        let stiff = worst * plan.dt;
        if stiff <= STIFFNESS_LIMIT {
            return Ok(p);
        }
        let next = ((n as f64) * stiff / STIFFNESS_LIMIT).ceil() as usize;
        plan = IntegrationPlan::with_steps_per_period(config, next, t_final, stride)?;
    }
}

pub fn prepare(config: &ScenarioConfig, plan: IntegrationPlan) -> Result<Prepared> {
    config.validate()?;
    let decomposition = match plan.floquet_samples {
        Some(m) if config.method.kind.is_floquet() => Some(Arc::new(decompose(config, m)?)),
        _ => None,
    };
    let mut spec = generator_spec(config, decomposition.clone())?;
    if let Some(n) = plan.steps_per_period {
        spec.period_nodes = 2 * n;
    }
    let generator = match config.method.kind {
        GeneratorKind::Lindblad => lindblad_generator_interaction(&spec)?,
        GeneratorKind::FloquetLindblad => floquet_lindblad_generator(&spec)?,
        GeneratorKind::Redfield => redfield_generator(&spec)?,
        GeneratorKind::FloquetRedfield => floquet_redfield_generator(&spec)?,
    };
    Ok(Prepared {
        plan,
        generator,
        decomposition,
        h0_spectrum: hermitian_eigensystem(&config.h0())?,
    })
}

/// Recorded dynamics in the Schrödinger picture.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub kind: GeneratorKind,
    pub times: Vec<f64>,
    pub states: Vec<Operator>,
    /// Smallest eigenvalue of each recorded state.
    pub positivity_log: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states[0].nrows()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectories are never empty")
    }

    pub fn element_series(&self, i: usize, j: usize) -> Vec<C64> {
        self.states.iter().map(|r| r[(i, j)]).collect()
    }

    pub fn population(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|r| r[(k, k)].re).collect()
    }

    pub fn coherence(&self, i: usize, j: usize) -> Vec<f64> {
        self.states.iter().map(|r| r[(i, j)].norm()).collect()
    }

    pub fn final_state(&self) -> &Operator {
        self.states.last().expect("trajectories are never empty")
    }
}

/// One RK4 step of a constant superoperator as a matrix:
/// I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24.
fn rk4_matrix(l: &SuperOp, h: f64) -> SuperOp {
    let n = l.nrows();
    let hl = l * c(h);
    let id = identity(n);
    let mut t = &id + &hl * c(0.25);
    t = &id + &hl * &t * c(1.0 / 3.0);
    t = &id + &hl * &t * c(0.5);
    &id + &hl * &t
}

impl Prepared {
    /// System propagator U_S(t) for the interaction-picture transform at step k.
    fn frame(&self, k: usize, t: f64) -> Operator {
        match (
            &self.decomposition,
            self.plan.steps_per_period,
            self.plan.floquet_samples,
        ) {
            (Some(f), Some(n), Some(m)) => f.propagator_at_index(k * (m / n)),
            _ => self.h0_spectrum.map(|e| C64::from_polar(1.0, -e * t)),
        }
    }

    pub fn run(&self, rho0: &Operator) -> Result<Trajectory> {
        let g = &self.generator;
        let d = g.dim();
        if rho0.nrows() != d {
            return Err(Error::Config(format!(
                "initial state has dimension {}, generator {d}",
                rho0.nrows()
            )));
        }
        let plan = &self.plan;
        let cap = plan.steps / plan.stride + 2;
        let mut traj = Trajectory {
            kind: g.kind,
            times: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap),
            positivity_log: Vec::with_capacity(cap),
            warnings: Vec::new(),
        };
        let step_matrix = g.static_superoperator().map(|l| {
            let sub = (superop_inf_norm(l) * plan.dt / STIFFNESS_LIMIT)
                .ceil()
                .max(1.0) as u32;
            rk4_matrix(l, plan.dt / sub as f64).pow(sub)
        });
        let mut v = vectorize(rho0);
        let mut warned = false;
        for k in 0..=plan.steps {
            let t = k as f64 * plan.dt;
            if k > 0 {
                v = match &step_matrix {
                    Some(m) => m * &v,
                    None => rk4_step(g, t - plan.dt, plan.dt, &v, d),
                };
            }
            if k % plan.stride != 0 && k != plan.steps {
                continue;
            }
            let mut rho = unvectorize(&v, d);
            if g.picture == Picture::Interaction {
                let u = self.frame(k, t);
                rho = &u * rho * u.adjoint();
            }
            let tr = rho.trace();
            let drift = (tr - c(1.0)).norm();
            if !(drift <= TRACE_DRIFT_LIMIT) {
                return Err(Error::Numerical(format!(
                    "trace drifted by {drift:.3e} at t = {t}; use a smaller dt"
                )));
            }
            let lam = min_eigenvalue(&hermitian_part(&rho));
            if g.kind.is_redfield() && lam < REDFIELD_NEGATIVITY_WARNING && !warned {
                warned = true;
                traj.warnings.push(format!(
                    "density matrix lost positivity at t = {t} (min eigenvalue {lam:.3e})"
                ));
            }
            traj.times.push(t);
            traj.states.push(rho);
            traj.positivity_log.push(lam);
        }
        Ok(traj)
    }
}

fn rk4_step(
    g: &Generator,
    t: f64,
    h: f64,
    v: &nalgebra::DVector<C64>,
    d: usize,
) -> nalgebra::DVector<C64> {
    let f = |s: f64, x: &nalgebra::DVector<C64>| vectorize(&g.apply(s, &unvectorize(x, d)));
    let k1 = f(t, v);
    let k2 = f(t + 0.5 * h, &(v + &k1 * c(0.5 * h)));
    let k3 = f(t + 0.5 * h, &(v + &k2 * c(0.5 * h)));
    let k4 = f(t + h, &(v + &k3 * c(h)));
    v + (k1 + (k2 + k3) * c(2.0) + k4) * c(h / 6.0)
}

/// Integrate a scenario from its initial state to at least `t_final`.
pub fn evolve(
    config: &ScenarioConfig,
    t_final: f64,
    dt: Option<f64>,
    stride: Option<usize>,
) -> Result<Trajectory> {
    let prepared = prepare_refined(config, t_final, dt, stride)?;
    let rho0 = config.initial_state.build(config.dim())?;
    prepared.run(rho0.as_operator())
}

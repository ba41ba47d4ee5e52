use crate::error::{Error, Result};
use crate::operator::{c, identity, unitarity_defect, Operator, I};

const DEFECT_LIMIT: f64 = 1e-5;

fn rk4_step(h: &dyn Fn(f64) -> Operator, t: f64, dt: f64, u: &Operator) -> Operator {
    let f = |s: f64, v: &Operator| -(h(s) * v) * I;
    let k1 = f(t, u);
    let k2 = f(t + 0.5 * dt, &(u + &k1 * c(0.5 * dt)));
    let k3 = f(t + 0.5 * dt, &(u + &k2 * c(0.5 * dt)));
    let k4 = f(t + dt, &(u + &k3 * c(dt)));
    u + (k1 + (k2 + k3) * c(2.0) + k4) * c(dt / 6.0)
}

/// U(t1, t0) for i dU/dt = H(t)U by fixed-step RK4.
pub fn propagate_schrodinger(
    h: &dyn Fn(f64) -> Operator,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Operator> {
    if steps == 0 {
        return Err(Error::Validation(
            "propagation needs at least one step".into(),
        ));
    }
    let d = h(t0).nrows();
    let dt = (t1 - t0) / steps as f64;
    let mut u = identity(d);
    for k in 0..steps {
        u = rk4_step(h, t0 + k as f64 * dt, dt, &u);
    }
    check_defect(&u, dt)?;
    Ok(u)
}

/// U(t0 + m·Δ, t0) for m = 0..=samples with Δ = span/samples, each interval
/// taken in `substeps` RK4 steps.
pub fn propagate_samples(
    h: &dyn Fn(f64) -> Operator,
    t0: f64,
    span: f64,
    samples: usize,
    substeps: usize,
) -> Result<Vec<Operator>> {
    if samples == 0 || substeps == 0 {
        return Err(Error::Validation(
            "propagation needs at least one sample and one substep".into(),
        ));
    }
    let d = h(t0).nrows();
    let n = samples * substeps;
    let dt = span / n as f64;
    let mut u = identity(d);
    let mut out = Vec::with_capacity(samples + 1);
    out.push(u.clone());
    for k in 0..n {
        // recompute the time from the step index to avoid drift
        u = rk4_step(h, t0 + k as f64 * dt, dt, &u);
        if (k + 1) % substeps == 0 {
            out.push(u.clone());
        }
    }
    check_defect(&u, dt)?;
    Ok(out)
}

fn check_defect(u: &Operator, dt: f64) -> Result<()> {
    let defect = unitarity_defect(u);
    if !(defect <= DEFECT_LIMIT) {
        return Err(Error::Numerical(format!(
            "propagator unitarity defect {defect:.3e} with step {dt:.3e}; refine the step size"
        )));
    }
    Ok(())
}

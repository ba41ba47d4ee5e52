use super::drive::DriveSpec;
use crate::bath::quadrature::GaussLegendre;
use crate::error::{Error, Result};
use crate::operator::{c, commutator, exp_anti_hermitian, hermitian_eigensystem, Operator, C64, I};

/// Approximate propagator and diagnostics.
#[derive(Debug, Clone)]
pub struct MagnusBch {
    pub propagator: Operator,
    /// log U as composed by the truncated BCH series (computational basis).
    pub exponent: Operator,
    pub warning: Option<String>,
}

const GL_POINTS: usize = 64;

/// Interaction-picture drive −iμ cos(Ωt) e^{iH0t} X e^{−iH0t} in the H0 eigenbasis.
struct Integrand {
    x: Operator,
    energies: Vec<f64>,
    mu: f64,
    omega: f64,
}

impl Integrand {
    fn at(&self, t: f64) -> Operator {
        let d = self.energies.len();
        let ph: Vec<C64> = self
            .energies
            .iter()
            .map(|e| C64::from_polar(1.0, e * t))
            .collect();
        let amp = -I * (self.mu * (self.omega * t).cos());
        Operator::from_fn(d, d, |a, b| self.x[(a, b)] * ph[a] * ph[b].conj() * amp)
    }

    /// ∫_0^s A by Gauss–Legendre, accumulated without temporaries.
    fn integral(&self, gl: &GaussLegendre, s: f64) -> Operator {
        let d = self.energies.len();
        let mut acc = Operator::zeros(d, d);
        for (u, w) in gl.mapped(0.0, s) {
            let amp = -I * (w * self.mu * (self.omega * u).cos());
            for a in 0..d {
                let pa = C64::from_polar(1.0, self.energies[a] * u) * amp;
                for b in 0..d {
                    let z = self.x[(a, b)];
                    if z != C64::new(0.0, 0.0) {
                        acc[(a, b)] += z * pa * C64::from_polar(1.0, -self.energies[b] * u);
                    }
                }
            }
        }
        acc
    }
}

/// First three Magnus terms Λ1, Λ2, Λ3 of the interaction-picture propagator,
/// in the H0 eigenbasis, together with that basis.
pub fn magnus_terms(
    drive: &DriveSpec,
    h0: &Operator,
    t: f64,
    order: usize,
) -> Result<(Vec<Operator>, Operator, Vec<f64>)> {
    if !(1..=3).contains(&order) {
        return Err(Error::Validation(format!(
            "Magnus order must be 1, 2 or 3, got {order}"
        )));
    }
    drive.validate(h0.nrows())?;
    let spec = hermitian_eigensystem(h0)?;
    let w = spec.eigenvectors.clone();
    let x = w.adjoint() * drive.coupling(h0.nrows()) * &w;
    let f = Integrand {
        x,
        energies: spec.eigenvalues.clone(),
        mu: drive.mu,
        omega: drive.omega_drive,
    };
    let gl = GaussLegendre::new(GL_POINTS);
    let d = h0.nrows();
    let mut terms = vec![f.integral(&gl, t)];
    if order >= 2 {
        let mut l2 = Operator::zeros(d, d);
        let mut l3 = Operator::zeros(d, d);
        for (t1, w1) in gl.mapped(0.0, t) {
            let a1 = f.at(t1);
            for (t2, w2) in gl.mapped(0.0, t1) {
                let a2 = f.at(t2);
                let c12 = commutator(&a1, &a2);
                l2 += &c12 * c(w1 * w2);
                if order >= 3 {
                    let i3 = f.integral(&gl, t2);
                    // [A1,[A2,A3]] + [A3,[A2,A1]] integrated over t3
                    let inner = commutator(&a1, &commutator(&a2, &i3)) + commutator(&i3, &(-&c12));
                    l3 += inner * c(w1 * w2);
                }
            }
        }
        terms.push(l2 * c(0.5));
        if order >= 3 {
            terms.push(l3 * c(1.0 / 6.0));
        }
    }
    Ok((terms, w, spec.eigenvalues))
}

/// Truncated Baker–Campbell–Hausdorff series for log(e^X e^Y), keeping the
/// first `terms` (1..=12) terms in the standard ordering.
pub fn bch_series(x: &Operator, y: &Operator, terms: usize) -> Result<(Operator, Vec<f64>)> {
    if !(1..=12).contains(&terms) {
        return Err(Error::Validation(format!(
            "BCH term count must be in 1..=12, got {terms}"
        )));
    }
    let cm = commutator;
    let xy = cm(x, y);
    let yx = -&xy;
    let xxy = cm(x, &xy);
    let yyx = cm(y, &yx);
    let list: Vec<Box<dyn Fn() -> Operator>> = vec![
        Box::new(|| x.clone()),
        Box::new(|| y.clone()),
        Box::new(|| &xy * c(0.5)),
        Box::new(|| &xxy * c(1.0 / 12.0)),
        Box::new(|| &yyx * c(1.0 / 12.0)),
        Box::new(|| cm(y, &xxy) * c(-1.0 / 24.0)),
        Box::new(|| cm(y, &cm(y, &yyx)) * c(-1.0 / 720.0)),
        Box::new(|| cm(x, &cm(x, &xxy)) * c(-1.0 / 720.0)),
        Box::new(|| cm(x, &cm(y, &yyx)) * c(1.0 / 360.0)),
        Box::new(|| cm(y, &cm(x, &xxy)) * c(1.0 / 360.0)),
        Box::new(|| cm(y, &cm(x, &cm(y, &xy))) * c(1.0 / 120.0)),
        Box::new(|| cm(x, &cm(y, &cm(x, &yx))) * c(1.0 / 120.0)),
    ];
    let mut sum = Operator::zeros(x.nrows(), x.ncols());
    let mut norms = Vec::with_capacity(terms);
    for f in list.iter().take(terms) {
        let t = f();
        norms.push(t.norm());
        sum += t;
    }
    Ok((sum, norms))
}

/// e^{log(e^Θ e^Λ)} with Θ = −itH0, Λ the Magnus series of the drive in the
/// interaction picture, and the logarithm taken from the truncated BCH series.
pub fn magnus_bch_propagator(
    drive: &DriveSpec,
    h0: &Operator,
    t: f64,
    magnus_order: usize,
    bch_terms: usize,
) -> Result<MagnusBch> {
    let (terms, w, energies) = magnus_terms(drive, h0, t, magnus_order)?;
    let d = h0.nrows();
    let mut lambda = Operator::zeros(d, d);
    for term in &terms {
        lambda += term;
    }
    let theta = Operator::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        energies.iter().map(|e| C64::new(0.0, -e * t)),
    ));
    let (e, norms) = bch_series(&theta, &lambda, bch_terms)?;
    let mut warning = None;
    if norms.len() > 3 {
        let first_correction = norms[2];
        let tail = norms[norms.len() - 1].max(norms[norms.len() - 2]);
        if tail > first_correction && first_correction > 0.0 {
            warning = Some(format!(
                "BCH series not decreasing: highest kept term norm {tail:.3e} exceeds ½‖[Θ,Λ]‖ = {first_correction:.3e} (‖Θ‖·‖Λ‖ = {:.3e})",
                norms[0] * norms[1]
            ));
        }
    }
    let u_eig = exp_anti_hermitian(&((&e - e.adjoint()) * c(0.5)))?;
    let propagator = &w * u_eig * w.adjoint();
    let exponent = &w * e * w.adjoint();
    Ok(MagnusBch {
        propagator,
        exponent,
        warning,
    })
}

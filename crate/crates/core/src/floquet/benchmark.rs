use super::decompose::FloquetDecomposition;
use crate::operator::{fidelity_unchecked, Operator, C64};

/// Fidelity series over one period.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub times: Vec<f64>,
    /// F[U_app(t), U_ex(t)].
    pub propagator_fidelity: Vec<f64>,
    /// F[P_app(t), P_app(t+τ)] with P_app(s) = U_app(s)e^{iH̄s}.
    pub periodicity_approx: Vec<f64>,
    /// The same for the reference propagator.
    pub periodicity_exact: Vec<f64>,
}

impl BenchmarkReport {
    pub fn min_propagator_fidelity(&self) -> f64 {
        self.propagator_fidelity
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_periodicity_approx(&self) -> f64 {
        self.periodicity_approx
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_periodicity_exact(&self) -> f64 {
        self.periodicity_exact
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Compare an approximate propagator with a reference on `points` uniformly
/// spaced times in [0, τ], and test periodicity of the periodic operator
/// they imply over two periods.
pub fn benchmark_fidelities(
    decomp: &FloquetDecomposition,
    exact: &dyn Fn(f64) -> Operator,
    approx: &dyn Fn(f64) -> Operator,
    points: usize,
) -> BenchmarkReport {
    let tau = decomp.tau;
    let n = points.max(2);
    let times: Vec<f64> = (0..n).map(|k| tau * k as f64 / (n - 1) as f64).collect();
    let back = |t: f64| decomp.quasi.map(|e| C64::from_polar(1.0, e * t));
    let mut report = BenchmarkReport {
        times: times.clone(),
        propagator_fidelity: Vec::with_capacity(n),
        periodicity_approx: Vec::with_capacity(n),
        periodicity_exact: Vec::with_capacity(n),
    };
    for &t in &times {
        let ue = exact(t);
        let ua = approx(t);
        report
            .propagator_fidelity
            .push(fidelity_unchecked(&ua, &ue));
        let pa0 = &ua * back(t);
        let pa1 = approx(t + tau) * back(t + tau);
        report
            .periodicity_approx
            .push(fidelity_unchecked(&pa0, &pa1));
        let pe0 = &ue * back(t);
        let pe1 = exact(t + tau) * back(t + tau);
        report
            .periodicity_exact
            .push(fidelity_unchecked(&pe0, &pe1));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{
        floquet_decompose, propagate_schrodinger, DriveSpec, DrivenHamiltonian, FloquetGrid,
    };
    use crate::operator::diag;

    #[test]
    fn identical_propagators_have_unit_fidelity() {
        let h0 = diag(&[0.0, 3.0, 2.5]);
        let d = DriveSpec {
            mu: 0.1,
            omega_drive: 2.25,
            pair: (0, 2),
        };
        let ham = DrivenHamiltonian::new(h0.clone(), Some(d));
        let f = floquet_decompose(
            &|t| ham.at(t),
            d.tau(),
            &h0,
            FloquetGrid {
                samples: 64,
                substeps: 16,
            },
        )
        .unwrap();
        let u = |t: f64| propagate_schrodinger(&|s| ham.at(s), 0.0, t, 1000).unwrap();
        let r = benchmark_fidelities(&f, &u, &u, 9);
        assert!(r
            .propagator_fidelity
            .iter()
            .all(|&x| (x - 1.0).abs() < 1e-8));
        assert!(
            r.min_periodicity_exact() > 1.0 - 1e-6,
            "{}",
            r.min_periodicity_exact()
        );
    }
}

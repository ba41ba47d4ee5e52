use super::decompose::FloquetDecomposition;
use crate::error::{Error, Result};
use crate::operator::{zeros, Operator, C64};

/// Harmonics S(q) of P†(t)SP(t) = Σ_q S(q) e^{iqΩt}, q ∈ [−Q, Q].
#[derive(Debug, Clone)]
pub struct FourierOperatorSet {
    pub q_max: usize,
    pub floor: f64,
    coefficients: Vec<Operator>,
}

impl FourierOperatorSet {
    /// A set with only a q = 0 harmonic (the undriven case).
    pub fn static_operator(s: &Operator) -> Self {
        FourierOperatorSet {
            q_max: 0,
            floor: 0.0,
            coefficients: vec![s.clone()],
        }
    }

    pub fn get(&self, q: i64) -> Option<&Operator> {
        let idx = q + self.q_max as i64;
        if idx < 0 {
            return None;
        }
        self.coefficients.get(idx as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Operator)> {
        let qm = self.q_max as i64;
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(k, s)| (k as i64 - qm, s))
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].nrows()
    }

    /// Σ_q S(q) e^{iqΩt}.
    pub fn reconstruct(&self, t: f64, omega: f64) -> Operator {
        let mut out = zeros(self.dim());
        for (q, s) in self.iter() {
            out += s * C64::from_polar(1.0, q as f64 * omega * t);
        }
        out
    }
}

/// S(q) = (1/τ)∫_0^τ e^{−iqΩt} P†(t)SP(t) dt by the trapezoidal rule on the
/// decomposition's sample grid; entries below `floor` in modulus are zeroed.
pub fn fourier_operator_coefficients(
    decomp: &FloquetDecomposition,
    s: &Operator,
    q_max: usize,
    floor: f64,
) -> Result<FourierOperatorSet> {
    let m = decomp.grid_len();
    if m < 8 * q_max {
        return Err(Error::Numerical(format!(
            "Fourier grid of {m} samples is too coarse for q_max = {q_max} (need at least {})",
            8 * q_max
        )));
    }
    let rotated: Vec<Operator> = decomp
        .p_samples
        .iter()
        .map(|(_, p)| p.adjoint() * s * p)
        .collect();
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let mut coefficients = Vec::with_capacity(2 * q_max + 1);
    for q in -(q_max as i64)..=(q_max as i64) {
        let mut acc = zeros(s.nrows());
        for (k, r) in rotated.iter().enumerate() {
            acc += r * C64::from_polar(1.0, -(q as f64) * step * k as f64);
        }
        acc /= C64::new(m as f64, 0.0);
        for z in acc.iter_mut() {
            if z.norm() < floor {
                *z = C64::new(0.0, 0.0);
            }
        }
        coefficients.push(acc);
    }
    Ok(FourierOperatorSet {
        q_max,
        floor,
        coefficients,
    })
}

use super::fourier::FourierOperatorSet;
use crate::operator::{Operator, Spectrum, C64};
use std::collections::BTreeMap;

/// Operators S(q, ω) = Σ_{ε̄−ε̄′=ω} |ε̄⟩⟨ε̄|S(q)|ε̄′⟩⟨ε̄′|.
#[derive(Debug, Clone)]
pub struct JumpOperatorTable {
    /// Sorted distinct gaps.
    pub gaps: Vec<f64>,
    /// Keyed by (q, index into `gaps`); only non-vanishing entries are kept.
    pub entries: BTreeMap<(i64, usize), Operator>,
}

impl JumpOperatorTable {
    pub fn entry(&self, q: i64, omega: f64) -> Option<&Operator> {
        let g = self.gap_index(omega)?;
        self.entries.get(&(q, g))
    }

    pub fn gap_index(&self, omega: f64) -> Option<usize> {
        let (k, d) = self
            .gaps
            .iter()
            .enumerate()
            .map(|(k, g)| (k, (g - omega).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        (d < 1e-6).then_some(k)
    }

    /// (q, ω, S(q, ω)) for every stored entry.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64, &Operator)> {
        self.entries.iter().map(|(&(q, g), s)| (q, self.gaps[g], s))
    }

    pub fn q_range(&self) -> Option<(i64, i64)> {
        let lo = self.entries.keys().map(|k| k.0).min()?;
        let hi = self.entries.keys().map(|k| k.0).max()?;
        Some((lo, hi))
    }

    /// Σ_ω S(q, ω).
    pub fn sum_over_gaps(&self, q: i64, dim: usize) -> Operator {
        let mut out = Operator::zeros(dim, dim);
        for ((qq, _), s) in &self.entries {
            if *qq == q {
                out += s;
            }
        }
        out
    }
}

/// Sorted distinct differences ε_a − ε_b and the cluster index of every pair.
///
/// Differences closer than `tol` are merged; a cluster is represented by its
/// mean.
pub fn cluster_gaps(energies: &[f64], tol: f64) -> (Vec<f64>, Vec<Vec<usize>>) {
    let d = energies.len();
    let mut diffs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let w = if a == b {
                0.0
            } else {
                energies[a] - energies[b]
            };
            diffs.push((w, a, b));
        }
    }
    diffs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // each cluster is anchored at its smallest member
    let mut anchors: Vec<f64> = Vec::new();
    let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for (w, a, b) in diffs {
        match anchors.last() {
            Some(&first) if w - first <= tol => {
                let k = anchors.len() - 1;
                members[k].push((a, b));
                sums[k].0 += w;
                sums[k].1 += 1;
            }
            _ => {
                anchors.push(w);
                members.push(vec![(a, b)]);
                sums.push((w, 1));
            }
        }
    }
    let means: Vec<f64> = sums.iter().map(|(s, n)| s / *n as f64).collect();
    let mut assign = vec![vec![0usize; d]; d];
    for (k, m) in members.iter().enumerate() {
        for &(a, b) in m {
            assign[a][b] = k;
        }
    }
    // exact zero for the diagonal cluster
    let gaps = means
        .iter()
        .zip(&members)
        .map(|(&g, m)| {
            if m.iter().any(|&(a, b)| a == b) {
                0.0
            } else {
                g
            }
        })
        .collect();
    (gaps, assign)
}

/// Decompose each harmonic S(q) by quasienergy gaps.
pub fn jump_operator_table(
    fset: &FourierOperatorSet,
    quasi: &Spectrum,
    gap_tol: f64,
) -> JumpOperatorTable {
    let (gaps, assign) = cluster_gaps(&quasi.eigenvalues, gap_tol);
    let v = &quasi.eigenvectors;
    let d = quasi.dim();
    let mut entries = BTreeMap::new();
    for (q, s) in fset.iter() {
        let rotated = v.adjoint() * s * v;
        let mut parts: BTreeMap<usize, Operator> = BTreeMap::new();
        for a in 0..d {
            for b in 0..d {
                let z = rotated[(a, b)];
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                let piece = v.column(a) * v.column(b).adjoint() * z;
                *parts
                    .entry(assign[a][b])
                    .or_insert_with(|| Operator::zeros(d, d)) += piece;
            }
        }
        for (g, op) in parts {
            if op.norm() > 1e-15 {
                entries.insert((q, g), op);
            }
        }
    }
    JumpOperatorTable { gaps, entries }
}

/// Gap decomposition of a static operator in the eigenbasis of H0.
pub fn static_jump_table(s: &Operator, spectrum: &Spectrum, gap_tol: f64) -> JumpOperatorTable {
    jump_operator_table(&FourierOperatorSet::static_operator(s), spectrum, gap_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{c, diag, hermitian_eigensystem, ket_bra};

    #[test]
    fn static_two_level() {
        let h = diag(&[0.0, 3.0]);
        let sx = (ket_bra(2, 0, 1) + ket_bra(2, 1, 0)) * c(0.5);
        let spec = hermitian_eigensystem(&h).unwrap();
        let t = static_jump_table(&sx, &spec, 1e-4);
        assert_eq!(t.gaps, vec![-3.0, 0.0, 3.0]);
        // raising component sits at ω = ε_1 − ε_0 = +3
        let up = t.entry(0, 3.0).unwrap();
        assert!((up - ket_bra(2, 1, 0) * c(0.5)).norm() < 1e-14);
        let down = t.entry(0, -3.0).unwrap();
        assert!((down - ket_bra(2, 0, 1) * c(0.5)).norm() < 1e-14);
        assert!(t.entry(0, 0.0).is_none());
        assert!((t.sum_over_gaps(0, 2) - sx).norm() < 1e-14);
    }

    #[test]
    fn clustering_merges_close_gaps() {
        let (g, a) = cluster_gaps(&[0.0, 1.0, 1.00001], 1e-4);
        assert_eq!(g.len(), 3);
        assert_eq!(a[1][0], a[2][0]);
        assert_eq!(a[0][0], a[1][2]);
        assert_eq!(g[a[0][0]], 0.0);
    }
}

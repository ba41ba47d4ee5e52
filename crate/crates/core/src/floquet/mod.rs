//! Floquet analysis of cosine-driven few-level Hamiltonians: propagators,
//! Floquet Hamiltonian, periodic operator, Fourier and jump-operator tables,
//! and the Magnus–BCH approximation.

mod benchmark;
mod decompose;
mod drive;
mod fourier;
mod jump;
mod magnus;
mod propagate;

pub use benchmark::{benchmark_fidelities, BenchmarkReport};
pub use decompose::{floquet_decompose, Branch, FloquetDecomposition, FloquetGrid};
pub use drive::{DriveSpec, DrivenHamiltonian};
pub use fourier::{fourier_operator_coefficients, FourierOperatorSet};
pub use jump::{cluster_gaps, jump_operator_table, static_jump_table, JumpOperatorTable};
pub use magnus::{bch_series, magnus_bch_propagator, magnus_terms, MagnusBch};
pub use propagate::{propagate_samples, propagate_schrodinger};

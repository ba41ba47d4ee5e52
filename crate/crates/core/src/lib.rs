//! Few-level open quantum dynamics: Lindblad, Floquet-Lindblad, Redfield and
//! Floquet-Redfield master equations with Lamb-shift corrections.
//!
//! Natural units are used throughout (ħ = c = k_B = ε0 = 1).

pub mod bath;
pub mod error;
pub mod floquet;
pub mod generators;
pub mod operator;
pub mod scenarios;

pub use error::{Error, Result};
pub use operator::{Operator, C64};

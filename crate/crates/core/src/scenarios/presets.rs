use super::config::{InitialState, MethodConfig, ScenarioConfig};
use crate::bath::{BathSpec, OhmicSpec, SpectralDensity};
use crate::floquet::DriveSpec;
use crate::generators::GeneratorKind;
use serde::{Deserialize, Serialize};

/// Inverse temperatures and Ohmic parameters of the hot and cold baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathConstants {
    pub beta_h: f64,
    pub beta_c: f64,
    pub hot: OhmicSpec,
    pub cold: OhmicSpec,
}

impl Default for BathConstants {
    /// β_c/β_h = 30/4.
    fn default() -> Self {
        BathConstants {
            beta_h: 1.0 / 30.0,
            beta_c: 1.0 / 4.0,
            hot: OhmicSpec {
                j0: 4e-4,
                omega_cutoff: 2.0f64.sqrt(),
            },
            cold: OhmicSpec {
                j0: 4e-3,
                omega_cutoff: 0.2f64.sqrt(),
            },
        }
    }
}

pub const DRIVE_MU: f64 = 0.1;
pub const DRIVE_OMEGA: f64 = 2.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreeLevelVariant {
    Nondriven,
    /// Drive on 0 ↔ b.
    V0,
    /// Drive on 1 ↔ b.
    V1,
}

fn bath(name: &str, beta: f64, spec: OhmicSpec, transitions: Vec<(usize, usize)>) -> BathSpec {
    BathSpec {
        name: name.into(),
        beta,
        spectral: SpectralDensity::from(spec),
        transitions,
        dipoles: None,
    }
}

/// Levels (|0⟩, |1⟩, |b⟩) with energies (0, 3, 2.5); the hot bath couples
/// 0 ↔ 1 and the cold bath b ↔ 1.
pub fn build_three_level(variant: ThreeLevelVariant, consts: &BathConstants) -> ScenarioConfig {
    let (drive, kind, q_max) = match variant {
        ThreeLevelVariant::Nondriven => (None, GeneratorKind::Lindblad, 0),
        ThreeLevelVariant::V0 => (Some((0, 2)), GeneratorKind::FloquetLindblad, 24),
        ThreeLevelVariant::V1 => (Some((1, 2)), GeneratorKind::FloquetLindblad, 3),
    };
    ScenarioConfig {
        labels: Some(vec!["0".into(), "1".into(), "b".into()]),
        energies: vec![0.0, 3.0, 2.5],
        target_level: 2,
        drive: drive.map(|pair| DriveSpec {
            mu: DRIVE_MU,
            omega_drive: DRIVE_OMEGA,
            pair,
        }),
        baths: vec![
            bath("hot", consts.beta_h, consts.hot, vec![(1, 0)]),
            bath("cold", consts.beta_c, consts.cold, vec![(1, 2)]),
        ],
        method: MethodConfig {
            kind,
            q_max: q_max.max(1),
            ..MethodConfig::default()
        },
        initial_state: InitialState::default(),
    }
}

/// Levels (|0⟩, |1⟩, |2⟩, |b⟩) with energies (0, 3, 3 + gap12, 2.5); the hot
/// bath couples 0 ↔ 1, 0 ↔ 2 and the cold bath b ↔ 1, b ↔ 2. The optional
/// drive couples 0 ↔ b.
pub fn build_four_level(gap12: f64, driven: bool, consts: &BathConstants) -> ScenarioConfig {
    let kind = if driven {
        GeneratorKind::FloquetRedfield
    } else {
        GeneratorKind::Redfield
    };
    ScenarioConfig {
        labels: Some(vec!["0".into(), "1".into(), "2".into(), "b".into()]),
        energies: vec![0.0, 3.0, 3.0 + gap12, 2.5],
        target_level: 3,
        drive: driven.then_some(DriveSpec {
            mu: DRIVE_MU,
            omega_drive: DRIVE_OMEGA,
            pair: (0, 3),
        }),
        baths: vec![
            bath("hot", consts.beta_h, consts.hot, vec![(1, 0), (2, 0)]),
            bath("cold", consts.beta_c, consts.cold, vec![(1, 3), (2, 3)]),
        ],
        method: MethodConfig {
            kind,
            ..MethodConfig::default()
        },
        initial_state: InitialState::default(),
    }
}

/// Named presets.
pub const PRESETS: &[&str] = &[
    "three_level_nondriven",
    "three_level_v0",
    "three_level_v1",
    "four_level_degenerate",
    "four_level_nondegenerate",
    "four_level_degenerate_driven",
    "four_level_nondegenerate_driven",
];

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let c = BathConstants::default();
    Some(match name {
        "three_level_nondriven" => build_three_level(ThreeLevelVariant::Nondriven, &c),
        "three_level_v0" => build_three_level(ThreeLevelVariant::V0, &c),
        "three_level_v1" => build_three_level(ThreeLevelVariant::V1, &c),
        "four_level_degenerate" => build_four_level(0.0, false, &c),
        "four_level_nondegenerate" => build_four_level(0.05, false, &c),
        "four_level_degenerate_driven" => build_four_level(0.0, true, &c),
        "four_level_nondegenerate_driven" => build_four_level(0.05, true, &c),
        _ => return None,
    })
}

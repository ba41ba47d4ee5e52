//! Scenario presets, trajectory integration and efficiency analysis.

mod analysis;
mod config;
mod evolve;
mod presets;
mod report;

pub use analysis::{
    cumulative_efficiency, efficiency, trajectory_diagnostics, DiagnosticsReport, EfficiencyReport,
};
pub use config::{qubit_dipole_calibration, InitialState, MethodConfig, ScenarioConfig};
pub use evolve::{
    decompose, evolve, generator_spec, prepare, prepare_refined, superop_inf_norm, IntegrationPlan,
    Prepared, Trajectory, DEFAULT_STATIC_DT, MAX_RECORDS, REDFIELD_NEGATIVITY_WARNING,
    STEPS_PER_PERIOD, STIFFNESS_LIMIT, TRACE_DRIFT_LIMIT,
};
pub use presets::{
    build_four_level, build_three_level, preset, BathConstants, ThreeLevelVariant, DRIVE_MU,
    DRIVE_OMEGA, PRESETS,
};
pub use report::{
    fidelity_benchmark, floquet_report, FloquetReport, BCH_TERMS, MAGNUS_ORDER,
    REFERENCE_STEPS_PER_PERIOD,
};

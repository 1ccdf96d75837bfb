//! Experiment configuration, presets and report emission.

mod config;
mod experiment;
pub mod format;
mod presets;

pub use config::{
    parse_config, Caps, CloudSpec, DriverSpec, EpsSpec, ExperimentConfig, IfsSpec, MapSpec,
    OutputSpec, PsiSpec, ScaleSpec, TailKind, SCHEMA_VERSION,
};
pub use experiment::{
    eps_for, example4_fixture, prepare, run_experiment, summary, write_report, Prepared, RateRow,
    RunReport,
};
pub use presets::{preset, PRESET_NAMES};

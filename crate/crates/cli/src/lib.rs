//! Scenario orchestration for vacuumlab: TOML configs, runs with atomic output directories,
//! parallel sweeps, checkpoint/resume of 1-d runs and the acceptance suite.

pub mod acceptance;
pub mod checkpoint;
pub mod config;
pub mod output;
pub mod scenarios;
pub mod sweep;

pub use acceptance::{run_acceptance, AcceptanceReport, CriterionOutcome};
pub use checkpoint::{Checkpoint, CheckpointError};
pub use config::{ConfigError, Kind, ScenarioConfig};
pub use output::{output_root, RunManifest, OUTPUT_ROOT_ENV};
pub use scenarios::{resume, run, run_at};
pub use sweep::{sweep, SweepOutcome};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
}

/// Exit code for an error: configuration problems map to [`exit::CONFIG_ERROR`].
pub fn error_exit_code(e: &anyhow::Error) -> i32 {
    if e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some()) {
        exit::CONFIG_ERROR
    } else {
        exit::FAIL
    }
}

//! Scenario configuration, geometry, pipeline orchestration, sweeps and the
//! acceptance suite on top of `incbound-core`.

pub mod config;
mod error;
pub mod geometry;
pub mod pipeline;
pub mod sweep;
pub mod verify;

pub use config::ScenarioConfig;
pub use error::{HarnessError, HarnessResult};
pub use pipeline::{bound, run_scenario, simulate, Report, Simulation};

//! Desk-scale storm surge barrier wall controller: scenario configuration,
//! model generation, the property corpus and the verification suite.

mod ballast;
mod config;
mod corpus;
mod generate;
mod suite;

use thiserror::Error;

use crate::checker::CheckError;
use crate::lts::ExploreError;

pub use ballast::{ballast_table, BallastRow, Band, Closure, Tilt};
pub use config::{
    parse_scenario, validate_config, Phase, PumpId, ScenarioConfig, Source, BALLAST_PUMPS, COMPARTMENTS, DEFAULT_LEVELS,
    DEFAULT_PUMP_BUDGET, DEFAULT_WALL_SLITS, DOCK_PUMPS, MAX_FAILED_BALLAST_PUMPS, MAX_FAILED_DOCK_PUMPS,
    MAX_FAILED_VALVES,
};
pub use corpus::{property_corpus, Property, Variant};
pub use generate::{generate_model, GenOptions, PROCESSES};
pub use suite::{
    build_model, dso_variant, fault_sweep, grid_audit, run_suite, BuiltModel, Outcome, PropertyRecord, PropertyResult, SuiteOptions,
    SuiteReport, SweepEntry, ThresholdAudit, SWEEP_EXCLUDED,
};

#[derive(Debug, Error)]
pub enum BeswError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("scenario line {line}: {message}")]
    Scenario { line: usize, message: String },
    #[error("generated model is rejected: {0}")]
    Generator(String),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error("property {id}: {source}")]
    Check { id: String, source: CheckError },
}

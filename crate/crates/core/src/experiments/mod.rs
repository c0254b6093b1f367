//! Simulation harness: scenario generation, method runs, aggregation over
//! replications and the registry of numerical theory checks.

mod config;
mod input;
mod methods;
mod report;
mod scenario;
pub mod verify;

pub use config::{HbSettings, MethodSpec, ScenarioConfig, SignalLaw, SignalSpec, DESK_REPS, FULL_SCALE_REPS};
pub use input::{parse_observations, read_observations};
pub use methods::{normal_multiplier, run_method, MethodOptions, MethodOutput};
pub use report::{aggregate, evaluate, run_scenario, MethodSummary, RegionMeans, RepRecord, RuleSummary, RunReport, Split};
pub use scenario::{generate, three_group_levels, Scenario};
pub use verify::{registry, verify_theory, CheckInfo, CheckOutcome, Measurement, VerifyParams};

//! Scenario configuration, seeded Monte-Carlo execution, RMSE and the three
//! experiment families (RMSE vs. iterations, RMSE vs. time, packets vs.
//! communication radius).

pub mod config;
pub mod experiment;
pub mod output;
pub mod seeds;

pub use config::{IterationSetting, ScenarioConfig};
pub use experiment::{
    rmse, rmse_vs_time, run_monte_carlo, run_single, sweep_iterations, sweep_radius, CostMethod, DiameterRule,
    RadiusRow, RunRecord, RunResult, RunSeeds, Scenario, SweepRow, TrackerRun,
};
pub use seeds::{derive_seed, Stream};

//! Scenario configuration, traffic placement, multi-seed runs, metrics and
//! the scripted micro-topologies.

mod config;
mod metrics;
mod runner;
pub mod scripted;
pub mod stats;
mod traffic;

pub use config::{PlacementFile, ScenarioConfig, Topology, Traffic};
pub use metrics::{emit_csv, fixed, summarize, throughput_mbps, write_csv, MetricsRecord, CSV_HEADER};
pub use runner::{
    build_world, emit_trace, run_experiment, run_experiment_with, run_once, write_trace, RunOptions, RunOutput, TraceRow,
};
pub use traffic::{build_traffic, Endpoint, TrafficPlan};

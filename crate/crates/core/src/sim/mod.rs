//! Deterministic agent-based airspace simulation driving the contracts.
//!
//! Each tick: drones advance along their routes and broadcast RID, reporters
//! in range decide what to report (optionally in parallel), and the
//! resulting calls are applied to the ledger in reporter order. Drones that
//! have arrived then settle, and the tick's transactions are sealed.

pub mod metrics;
pub mod scenario;
mod world;

pub use metrics::{MissionMetrics, OperationCount, OperatorMetrics, QuoteSample, ReporterMetrics, RunMetrics};
pub use scenario::{
    presets, DroneAgentSpec, DroneBehavior, Extent, Honesty, MissionSpec, Mobility, ReporterAgentSpec, Scenario,
};
pub use world::{
    run, run_with, DroneAgent, DronePhase, PendingReplay, ReporterAgent, RunOptions, RunOutput, TraceRow, World,
};

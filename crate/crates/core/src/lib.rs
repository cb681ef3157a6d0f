//! Deterministic simulation of a human-agent team escaping a maze.
//!
//! Agents pick actions from conditional probability tables, raise and
//! negotiate contracts for purpose functions, and rate each other on a
//! ladder of trust built from capability, predictability and integrity.
//! The allocator prefers the most suitable trusted teammate and falls back
//! to the next one when trust drops.

pub mod agents;
pub mod allocation;
pub mod engine;
pub mod event;
pub mod metrics;
pub mod mission;
pub mod rng;
pub mod scenario;
pub mod trust;
pub mod world;

pub use engine::{replay_verify, run, EngineError, ReplayReport, RunResult, Simulation};
pub use event::{Event, EventKind};
pub use metrics::{Metrics, PlotRow, TrustSample};
pub use scenario::{Diagnostic, Scenario, ScenarioError};

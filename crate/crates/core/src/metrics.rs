//! Run metrics and trust trajectories, derived from the trace.

use serde::{Deserialize, Serialize};

use crate::agents::AgentId;
use crate::allocation::ContractStatus;
use crate::event::{Event, EventKind};
use crate::mission::{Hardness, PurposeFunction};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Ticks simulated.
    pub ticks: u64,
    /// Tick of the last escape, when everyone got out.
    pub ticks_to_all_escape: Option<u64>,
    pub timed_out: bool,
    pub agents: usize,
    pub escaped: usize,
    pub tokens_collected: usize,
    pub gates_entered: usize,
    pub releases: usize,
    pub allocation_switches: usize,
    pub allocation_unfilled: usize,
    pub contracts_proposed: usize,
    pub contracts_accepted: usize,
    pub contracts_rejected: usize,
    pub contracts_completed: usize,
    pub contracts_failed: usize,
    pub violations: usize,
    pub hard_violations: usize,
    pub messages_sent: usize,
    pub actions_failed: usize,
}

impl Metrics {
    /// Recomputes every metric from `trace` for a team of `agents`.
    pub fn from_trace(trace: &[Event], agents: usize) -> Self {
        let mut m = Metrics {
            agents,
            ..Metrics::default()
        };
        let mut last_escape = 0;
        for e in trace {
            m.ticks = m.ticks.max(e.tick);
            match &e.kind {
                EventKind::Escaped { .. } => {
                    m.escaped += 1;
                    last_escape = e.tick;
                }
                EventKind::Collected { .. } => m.tokens_collected += 1,
                EventKind::GateEntered { .. } => m.gates_entered += 1,
                EventKind::Released { freed, .. } => m.releases += freed.len(),
                EventKind::AllocationSwitched { .. } => m.allocation_switches += 1,
                EventKind::AllocationUnfilled { .. } => m.allocation_unfilled += 1,
                EventKind::ContractProposed { .. } => m.contracts_proposed += 1,
                EventKind::ContractAccepted { .. } => m.contracts_accepted += 1,
                EventKind::ContractRejected { .. } => m.contracts_rejected += 1,
                EventKind::ContractSettled { status, .. } => match status {
                    ContractStatus::Completed => m.contracts_completed += 1,
                    ContractStatus::Failed => m.contracts_failed += 1,
                    _ => {}
                },
                EventKind::Violation { severity, .. } => {
                    m.violations += 1;
                    if *severity == Hardness::Hard {
                        m.hard_violations += 1;
                    }
                }
                EventKind::MessageSent { .. } => m.messages_sent += 1,
                EventKind::ActionFailed { .. } => m.actions_failed += 1,
                _ => {}
            }
        }
        if agents > 0 && m.escaped == agents {
            m.ticks_to_all_escape = Some(last_escape);
        } else {
            m.timed_out = true;
        }
        m
    }
}

/// One observer's trust in one target for one function at one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustSample {
    pub tick: u64,
    pub observer: AgentId,
    pub target: AgentId,
    pub function: PurposeFunction,
    pub capability: f64,
    pub predictability: f64,
    pub integrity: f64,
    pub composite: f64,
    pub rung: u8,
    pub successes: u32,
    pub trials: u32,
    pub hard_violation: bool,
}

/// A row of the trust plot table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub tick: u64,
    pub observer: AgentId,
    pub target: AgentId,
    pub function: PurposeFunction,
    pub capability: f64,
    pub predictability: f64,
    pub integrity: f64,
    pub composite: f64,
    pub rung: u8,
}

/// Plot rows sorted by tick, observer, target and function.
pub fn plot_rows(samples: &[TrustSample]) -> Vec<PlotRow> {
    let mut rows: Vec<PlotRow> = samples
        .iter()
        .map(|s| PlotRow {
            tick: s.tick,
            observer: s.observer,
            target: s.target,
            function: s.function,
            capability: s.capability,
            predictability: s.predictability,
            integrity: s.integrity,
            composite: s.composite,
            rung: s.rung,
        })
        .collect();
    rows.sort_by_key(|r| (r.tick, r.observer, r.target, r.function));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Position;

    #[test]
    fn counts_from_events() {
        let ev = |seq, tick, kind| Event { seq, tick, kind };
        let trace = vec![
            ev(0, 1, EventKind::Collected { agent: 1, pos: Position::new(2, 2) }),
            ev(1, 2, EventKind::Escaped { agent: 0, pos: Position::new(3, 1) }),
            ev(2, 4, EventKind::Escaped { agent: 1, pos: Position::new(3, 1) }),
        ];
        let m = Metrics::from_trace(&trace, 2);
        assert_eq!(m.ticks_to_all_escape, Some(4));
        assert_eq!(m.tokens_collected, 1);
        assert!(!m.timed_out);
        let partial = Metrics::from_trace(&trace[..2], 2);
        assert!(partial.timed_out);
        assert_eq!(partial.ticks_to_all_escape, None);
    }
}

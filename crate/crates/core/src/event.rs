//! Trace records. A run's trace is the append-only list of these, written
//! one JSON object per line.

use serde::{Deserialize, Serialize};

use crate::agents::{ActionKind, AgentId, Message};
use crate::allocation::{ContractId, ContractStatus, Exclusion, Need};
use crate::mission::{Hardness, MetricDeltas, ObjectFunction, PurposeFunction};
pub use crate::trust::TrustCause;
use crate::world::{Heading, Position};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub tick: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// Any movement or reorientation, including holding position.
    Moved {
        agent: AgentId,
        action: ActionKind,
        from: Position,
        to: Position,
        heading: Heading,
    },
    Stopped {
        agent: AgentId,
        /// Forced by a scenario fault rather than chosen.
        scripted: bool,
    },
    Collected {
        agent: AgentId,
        pos: Position,
    },
    Released {
        agent: AgentId,
        via: ActionKind,
        pos: Position,
        freed: Vec<AgentId>,
        /// Whether the square was still active when changed.
        deactivated: bool,
    },
    ActionFailed {
        agent: AgentId,
        action: ActionKind,
        reason: String,
    },
    MessageSent {
        agent: AgentId,
        message: Message,
    },
    MessageDelivered {
        agent: AgentId,
        from: AgentId,
        message: Message,
    },
    Trapped {
        agent: AgentId,
        pos: Position,
    },
    GateEntered {
        agent: AgentId,
        pos: Position,
    },
    Escaped {
        agent: AgentId,
        pos: Position,
    },
    ContractProposed {
        contract: ContractId,
        function: PurposeFunction,
        need: Need,
        origin: Position,
        performer: AgentId,
        supporters: Vec<AgentId>,
        affected: Vec<AgentId>,
        deadline: Option<u64>,
    },
    ContractAccepted {
        contract: ContractId,
        function: PurposeFunction,
        performer: AgentId,
    },
    ContractRejected {
        contract: ContractId,
        function: PurposeFunction,
        performer: AgentId,
        dissenters: Vec<AgentId>,
    },
    ContractSettled {
        contract: ContractId,
        function: PurposeFunction,
        performer: AgentId,
        status: ContractStatus,
    },
    /// The accepted performer differs from the best candidate on
    /// capability and availability alone.
    AllocationSwitched {
        function: PurposeFunction,
        from: AgentId,
        to: AgentId,
    },
    AllocationUnfilled {
        function: PurposeFunction,
        origin: Position,
        reason: String,
        exclusions: Vec<Exclusion>,
    },
    Violation {
        agent: AgentId,
        vpm: String,
        severity: Hardness,
        action: ObjectFunction,
    },
    TrustUpdated {
        observer: AgentId,
        target: AgentId,
        function: PurposeFunction,
        cause: TrustCause,
        successes: u32,
        trials: u32,
        integrity: f64,
        hard_violation: bool,
        composite: f64,
        rung_before: u8,
        rung: u8,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Moved { .. } => "moved",
            EventKind::Stopped { .. } => "stopped",
            EventKind::Collected { .. } => "collected",
            EventKind::Released { .. } => "released",
            EventKind::ActionFailed { .. } => "action_failed",
            EventKind::MessageSent { .. } => "message_sent",
            EventKind::MessageDelivered { .. } => "message_delivered",
            EventKind::Trapped { .. } => "trapped",
            EventKind::GateEntered { .. } => "gate_entered",
            EventKind::Escaped { .. } => "escaped",
            EventKind::ContractProposed { .. } => "contract_proposed",
            EventKind::ContractAccepted { .. } => "contract_accepted",
            EventKind::ContractRejected { .. } => "contract_rejected",
            EventKind::ContractSettled { .. } => "contract_settled",
            EventKind::AllocationSwitched { .. } => "allocation_switched",
            EventKind::AllocationUnfilled { .. } => "allocation_unfilled",
            EventKind::Violation { .. } => "violation",
            EventKind::TrustUpdated { .. } => "trust_updated",
        }
    }

    /// Agent whose turn produced this event, for the one record every agent
    /// contributes per tick.
    pub fn turn_actor(&self) -> Option<AgentId> {
        match *self {
            EventKind::Moved { agent, .. }
            | EventKind::Stopped { agent, .. }
            | EventKind::Collected { agent, .. }
            | EventKind::Released { agent, .. }
            | EventKind::ActionFailed { agent, .. }
            | EventKind::MessageSent { agent, .. } => Some(agent),
            _ => None,
        }
    }
}

/// Counter changes caused by one agent's turn.
pub fn turn_deltas(events: &[EventKind]) -> MetricDeltas {
    let mut d = MetricDeltas::default();
    for e in events {
        match e {
            EventKind::Collected { .. } => {
                d.ticks += 1;
                d.tokens += 1;
            }
            EventKind::Released { freed, deactivated, .. } => {
                d.ticks += 1;
                if !freed.is_empty() {
                    d.teamwork += 1;
                }
                if *deactivated {
                    d.tokens -= 1;
                }
            }
            EventKind::Stopped { .. } => d.ticks += 1,
            EventKind::Moved {
                action: ActionKind::Follow,
                from,
                to,
                ..
            } if from != to => d.teamwork += 1,
            EventKind::GateEntered { .. } => d.gates += 1,
            _ => {}
        }
    }
    d
}

/// One JSON object per line, each terminated by a newline.
pub fn to_jsonl(trace: &[Event]) -> String {
    let mut out = String::new();
    for e in trace {
        // Event holds only plain data, so serialisation cannot fail
        out.push_str(&serde_json::to_string(e).expect("event serialises"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> Result<Vec<Event>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

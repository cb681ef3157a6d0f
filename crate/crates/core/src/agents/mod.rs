//! Agents: state, perception, CPT-driven decisions, role-specific
//! interpretation of observations, and action execution.

mod act;
mod cpt;
mod interpret;
mod perceive;

pub use act::{apply_action, ActionContext, ActionOutcome};
pub use cpt::{decide, resolve, ActionCpt, CptRow, Decision, Distribution, SituationPattern, TaskKey};
pub use interpret::{interpret, translate, InterpretError, InterpretationTable, Meaning, Observation};
pub use perceive::{perceive, CellSense, InboxSummary, PerceptionContext, Seen, Situation, SituationKey, TaskView};

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mission::ObjectFunction;
use crate::world::{Hand, Heading, Position};

/// Index of an agent in the roster; also its turn order.
pub type AgentId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Leader,
    Collector,
    GateUser,
    Neutral,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Leader, Role::Collector, Role::GateUser, Role::Neutral];

    pub fn id(self) -> &'static str {
        match self {
            Role::Leader => "leader",
            Role::Collector => "collector",
            Role::GateUser => "gate_user",
            Role::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Role {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Role::ALL
            .into_iter()
            .find(|r| r.id() == key)
            .ok_or_else(|| AgentError::UnknownRole(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    Trapped,
    /// Halted by its own Stop; any later move makes it Active again.
    Stopped,
    Escaped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub id: AgentId,
    pub role: Role,
    pub pos: Position,
    pub heading: Heading,
    pub hand: Hand,
    pub status: Status,
    pub follow_target: Option<AgentId>,
    pub goal_weights: IndexMap<String, f64>,
    pub gates_entered: u32,
    pub tokens_collected: u32,
}

impl AgentState {
    pub fn new(id: AgentId, role: Role, pos: Position, heading: Heading, hand: Hand) -> Self {
        Self {
            id,
            role,
            pos,
            heading,
            hand,
            status: Status::Active,
            follow_target: None,
            goal_weights: IndexMap::new(),
            gates_entered: 0,
            tokens_collected: 0,
        }
    }

    pub fn is_escaped(&self) -> bool {
        self.status == Status::Escaped
    }

    pub fn is_trapped(&self) -> bool {
        self.status == Status::Trapped
    }
}

/// Message payloads. Senders are broadcast to every teammate still in the maze.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Message {
    FollowMe { sender: AgentId },
    Help { sender: AgentId, pos: Position },
    StopAll { sender: AgentId },
    TokenSighting { pos: Position },
    Stopped { sender: AgentId },
}

impl Message {
    pub fn observation(self) -> Observation {
        match self {
            Message::FollowMe { .. } => Observation::FollowMe,
            Message::Help { .. } => Observation::Help,
            Message::StopAll { .. } => Observation::StopAll,
            Message::TokenSighting { .. } => Observation::TokenSighting,
            Message::Stopped { .. } => Observation::Stopped,
        }
    }
}

/// What a CPT row can choose. Targets are filled in from the situation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Forward,
    Backward,
    TurnLeft,
    TurnRight,
    Enter,
    Collect,
    ChangeColour,
    Release,
    Follow,
    Stop,
    SendHelp,
    SendFollowMe,
    SendStopAll,
    SendTokenSighting,
    SendStopped,
}

impl ActionKind {
    pub const ALL: [ActionKind; 15] = [
        ActionKind::Forward,
        ActionKind::Backward,
        ActionKind::TurnLeft,
        ActionKind::TurnRight,
        ActionKind::Enter,
        ActionKind::Collect,
        ActionKind::ChangeColour,
        ActionKind::Release,
        ActionKind::Follow,
        ActionKind::Stop,
        ActionKind::SendHelp,
        ActionKind::SendFollowMe,
        ActionKind::SendStopAll,
        ActionKind::SendTokenSighting,
        ActionKind::SendStopped,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ActionKind::Forward => "forward",
            ActionKind::Backward => "backward",
            ActionKind::TurnLeft => "turn_left",
            ActionKind::TurnRight => "turn_right",
            ActionKind::Enter => "enter",
            ActionKind::Collect => "collect",
            ActionKind::ChangeColour => "change_colour",
            ActionKind::Release => "release",
            ActionKind::Follow => "follow",
            ActionKind::Stop => "stop",
            ActionKind::SendHelp => "send_help",
            ActionKind::SendFollowMe => "send_follow_me",
            ActionKind::SendStopAll => "send_stop_all",
            ActionKind::SendTokenSighting => "send_token_sighting",
            ActionKind::SendStopped => "send_stopped",
        }
    }

    pub fn is_send(self) -> bool {
        matches!(
            self,
            ActionKind::SendHelp
                | ActionKind::SendFollowMe
                | ActionKind::SendStopAll
                | ActionKind::SendTokenSighting
                | ActionKind::SendStopped
        )
    }

    /// Object-related function the action performs.
    pub fn object_function(self) -> ObjectFunction {
        match self {
            ActionKind::Forward | ActionKind::Backward => ObjectFunction::Forward,
            ActionKind::TurnLeft | ActionKind::TurnRight => ObjectFunction::Turn,
            ActionKind::Enter => ObjectFunction::Enter,
            ActionKind::Collect => ObjectFunction::Collect,
            ActionKind::ChangeColour => ObjectFunction::Change,
            ActionKind::Release => ObjectFunction::Release,
            ActionKind::Follow => ObjectFunction::Follow,
            ActionKind::Stop => ObjectFunction::Stop,
            _ => ObjectFunction::Message,
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ActionKind {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        ActionKind::ALL
            .into_iter()
            .find(|a| a.id() == key)
            .ok_or_else(|| AgentError::UnknownAction(s.to_string()))
    }
}

/// A resolved action. Missing targets make the action fail when applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "action")]
pub enum Action {
    MoveForward,
    MoveBackward,
    TurnLeft,
    TurnRight,
    Enter,
    Collect,
    ChangeColour { pos: Option<Position> },
    Release { target: Option<AgentId> },
    Follow { target: Option<AgentId> },
    Stop,
    /// `kind` is one of the send kinds; `message` is absent when the sender
    /// had nothing to report.
    Send { kind: ActionKind, message: Option<Message> },
}

impl Action {
    pub fn kind(self) -> ActionKind {
        match self {
            Action::MoveForward => ActionKind::Forward,
            Action::MoveBackward => ActionKind::Backward,
            Action::TurnLeft => ActionKind::TurnLeft,
            Action::TurnRight => ActionKind::TurnRight,
            Action::Enter => ActionKind::Enter,
            Action::Collect => ActionKind::Collect,
            Action::ChangeColour { .. } => ActionKind::ChangeColour,
            Action::Release { .. } => ActionKind::Release,
            Action::Follow { .. } => ActionKind::Follow,
            Action::Stop => ActionKind::Stop,
            Action::Send { kind, .. } => kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("unknown role {0:?}")]
    UnknownRole(String),
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("no CPT row matches situation {0}")]
    MissingRow(String),
}

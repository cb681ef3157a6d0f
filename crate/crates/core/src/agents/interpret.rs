//! Role-specific meaning of observations and the translation a sender must
//! perform when its meaning differs from the receiver's.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AgentId, Message, Role};
use crate::world::Position;

/// Things an agent can see or be told.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    BlackSquare,
    BlueSquare,
    RedSquare,
    Gate,
    Exit,
    TrappedTeammate,
    FollowMe,
    Help,
    StopAll,
    TokenSighting,
    Stopped,
}

impl Observation {
    pub const ALL: [Observation; 11] = [
        Observation::BlackSquare,
        Observation::BlueSquare,
        Observation::RedSquare,
        Observation::Gate,
        Observation::Exit,
        Observation::TrappedTeammate,
        Observation::FollowMe,
        Observation::Help,
        Observation::StopAll,
        Observation::TokenSighting,
        Observation::Stopped,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Meaning {
    Traversable,
    Impassable,
    Collectible,
    Trap,
    Releasable,
    Enterable,
    Escape,
    FollowCue,
    HelpRequest,
    Halt,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretError {
    #[error("observation {observation:?} has no meaning for {role}")]
    UnknownObservation { role: Role, observation: Observation },
    #[error("{sender} and {receiver} already agree on {observation:?}")]
    NoTranslationNeeded {
        sender: Role,
        receiver: Role,
        observation: Observation,
    },
}

/// Meaning of each observation for each role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretationTable {
    entries: BTreeMap<(Role, Observation), Meaning>,
}

impl InterpretationTable {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, role: Role, observation: Observation, meaning: Meaning) {
        self.entries.insert((role, observation), meaning);
    }

    pub fn get(&self, role: Role, observation: Observation) -> Option<Meaning> {
        self.entries.get(&(role, observation)).copied()
    }

    /// Whether every role reads `observation` the same way.
    pub fn is_common_ground(&self, observation: Observation) -> bool {
        let mut meanings = Role::ALL.iter().map(|r| self.get(*r, observation));
        let first = meanings.next().flatten();
        first.is_some() && meanings.all(|m| m == first)
    }
}

impl Default for InterpretationTable {
    fn default() -> Self {
        use Meaning as M;
        use Observation as O;
        let mut t = Self::empty();
        for role in Role::ALL {
            t.set(role, O::BlackSquare, M::Traversable);
            t.set(role, O::BlueSquare, M::Impassable);
            t.set(role, O::Gate, M::Enterable);
            t.set(role, O::Exit, M::Escape);
            t.set(role, O::StopAll, M::Halt);
            let red = if role == Role::Collector { M::Collectible } else { M::Trap };
            t.set(role, O::RedSquare, red);
            let stuck = match role {
                Role::Collector | Role::Neutral => M::Releasable,
                Role::Leader | Role::GateUser => M::Trap,
            };
            t.set(role, O::TrappedTeammate, stuck);
            let follow = if role == Role::Neutral { M::FollowCue } else { M::None };
            t.set(role, O::FollowMe, follow);
            let help = if role == Role::Leader { M::None } else { M::HelpRequest };
            t.set(role, O::Help, help);
            let sighting = if role == Role::Collector { M::Collectible } else { M::None };
            t.set(role, O::TokenSighting, sighting);
            let stopped = if role == Role::Leader { M::None } else { M::Halt };
            t.set(role, O::Stopped, stopped);
        }
        t
    }
}

pub fn interpret(table: &InterpretationTable, role: Role, observation: Observation) -> Result<Meaning, InterpretError> {
    table
        .get(role, observation)
        .ok_or(InterpretError::UnknownObservation { role, observation })
}

/// Message carrying the sender's observation in terms the receiver acts on.
///
/// The message is chosen by what the receiver will make of it: something it
/// can collect becomes a token sighting, something it can release becomes a
/// help call, a follow cue becomes follow-me, anything else is reported as
/// the sender having stopped.
pub fn translate(
    table: &InterpretationTable,
    sender: Role,
    receiver: Role,
    observation: Observation,
    sender_id: AgentId,
    at: Position,
) -> Result<Message, InterpretError> {
    let mine = interpret(table, sender, observation)?;
    let theirs = interpret(table, receiver, observation)?;
    if mine == theirs {
        return Err(InterpretError::NoTranslationNeeded {
            sender,
            receiver,
            observation,
        });
    }
    Ok(match theirs {
        Meaning::Collectible => Message::TokenSighting { pos: at },
        Meaning::Releasable | Meaning::HelpRequest => Message::Help { sender: sender_id, pos: at },
        Meaning::FollowCue => Message::FollowMe { sender: sender_id },
        _ => Message::Stopped { sender: sender_id },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_total() {
        let t = InterpretationTable::default();
        for role in Role::ALL {
            for obs in Observation::ALL {
                assert!(interpret(&t, role, obs).is_ok());
            }
        }
    }

    #[test]
    fn black_square_is_common_ground() {
        let t = InterpretationTable::default();
        for role in Role::ALL {
            assert_eq!(interpret(&t, role, Observation::BlackSquare), Ok(Meaning::Traversable));
        }
        assert!(t.is_common_ground(Observation::BlackSquare));
        assert!(!t.is_common_ground(Observation::RedSquare));
    }

    #[test]
    fn red_square_depends_on_role() {
        let t = InterpretationTable::default();
        assert_eq!(interpret(&t, Role::Collector, Observation::RedSquare), Ok(Meaning::Collectible));
        assert_eq!(interpret(&t, Role::Leader, Observation::RedSquare), Ok(Meaning::Trap));
        assert_eq!(interpret(&t, Role::Neutral, Observation::FollowMe), Ok(Meaning::FollowCue));
    }

    #[test]
    fn unknown_observation() {
        let t = InterpretationTable::empty();
        assert!(matches!(
            interpret(&t, Role::Leader, Observation::Gate),
            Err(InterpretError::UnknownObservation { .. })
        ));
    }

    #[test]
    fn translations() {
        let t = InterpretationTable::default();
        let at = Position::new(3, 4);
        assert_eq!(
            translate(&t, Role::Leader, Role::Collector, Observation::RedSquare, 0, at),
            Ok(Message::TokenSighting { pos: at })
        );
        assert!(matches!(
            translate(&t, Role::Leader, Role::Leader, Observation::BlackSquare, 0, at),
            Err(InterpretError::NoTranslationNeeded { .. })
        ));
        for receiver in [Role::Collector, Role::Neutral] {
            assert_eq!(
                translate(&t, Role::GateUser, receiver, Observation::TrappedTeammate, 2, at),
                Ok(Message::Help { sender: 2, pos: at })
            );
        }
    }
}

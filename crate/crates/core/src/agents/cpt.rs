//! Conditional probability tables and the sampling decision.

use std::fmt;

use indexmap::IndexMap;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::perceive::{CellSense, InboxSummary, Situation, SituationKey};
use super::{Action, ActionKind, AgentError, AgentState, Message, Status};
use crate::mission::PurposeFunction;
use crate::rng::SimRng;

/// Tolerance for a distribution's total mass.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Discrete distribution kept in declared order; sampling walks the
/// cumulative sum in that order so equal seeds give equal draws.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<K> {
    entries: Vec<(K, f64)>,
}

impl<K: Clone> Distribution<K> {
    pub fn new(entries: Vec<(K, f64)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(K, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Every probability in `[0, 1]` and a total of 1 within tolerance.
    pub fn check(&self) -> Result<(), String> {
        if let Some((_, p)) = self.entries.iter().find(|(_, p)| !(0.0..=1.0).contains(p)) {
            return Err(format!("probability {p} is outside [0, 1]"));
        }
        let total = self.total();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(())
    }

    /// Inverse-CDF draw for `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> Option<&K> {
        let mut acc = 0.0;
        for (k, p) in &self.entries {
            acc += p;
            if u < acc {
                return Some(k);
            }
        }
        // rounding left `u` past the last boundary
        self.entries.iter().rev().find(|(_, p)| *p > 0.0).map(|(k, _)| k)
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        let total = self.total();
        if total <= 0.0 {
            return 0.0;
        }
        self.entries
            .iter()
            .map(|(_, p)| p / total)
            .filter(|p| *p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }

    /// Keeps the entries `keep` admits and rescales them to total 1.
    /// `None` when nothing with positive mass survives.
    pub fn restrict(&self, keep: impl Fn(&K) -> bool) -> Option<Self> {
        let kept: Vec<(K, f64)> = self.entries.iter().filter(|(k, _)| keep(k)).cloned().collect();
        let total: f64 = kept.iter().map(|(_, p)| p).sum();
        if total <= 0.0 {
            return None;
        }
        Some(Self {
            entries: kept.into_iter().map(|(k, p)| (k, p / total)).collect(),
        })
    }
}

impl Distribution<String> {
    pub fn from_weights(weights: &IndexMap<String, f64>) -> Self {
        Self::new(weights.iter().map(|(k, p)| (k.clone(), *p)).collect())
    }
}

impl Serialize for Distribution<ActionKind> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: IndexMap<&str, f64> = self.entries.iter().map(|(k, p)| (k.id(), *p)).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Distribution<ActionKind> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = IndexMap::<String, f64>::deserialize(deserializer)?;
        let entries = map
            .into_iter()
            .map(|(k, p)| k.parse::<ActionKind>().map(|a| (a, p)).map_err(D::Error::custom))
            .collect::<Result<_, _>>()?;
        Ok(Self { entries })
    }
}

/// Contract a row can require the agent to be performing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKey {
    None,
    MoveThroughMaze,
    HelpTeamMates,
    GatherTokens,
    Communicate,
}

impl TaskKey {
    fn matches(self, task: Option<PurposeFunction>) -> bool {
        let want = match self {
            TaskKey::None => None,
            TaskKey::MoveThroughMaze => Some(PurposeFunction::MoveThroughMaze),
            TaskKey::HelpTeamMates => Some(PurposeFunction::HelpTeamMates),
            TaskKey::GatherTokens => Some(PurposeFunction::GatherTokens),
            TaskKey::Communicate => Some(PurposeFunction::Communicate),
        };
        want == task
    }
}

/// Row selector. Absent fields match anything.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SituationPattern {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on: Option<CellSense>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ahead: Option<CellSense>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub next: Option<CellSense>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trapped_visible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token_visible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inbox: Option<InboxSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_bucket: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskKey>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_task: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub following: Option<bool>,
}

impl SituationPattern {
    pub fn matches(&self, key: &SituationKey) -> bool {
        fn eq<T: PartialEq>(want: &Option<T>, have: &T) -> bool {
            want.as_ref().is_none_or(|w| w == have)
        }
        eq(&self.on, &key.on)
            && eq(&self.ahead, &key.ahead)
            && eq(&self.next, &key.next)
            && eq(&self.trapped_visible, &key.trapped_visible)
            && eq(&self.token_visible, &key.token_visible)
            && eq(&self.inbox, &key.inbox)
            && eq(&self.time_bucket, &key.time_bucket)
            && self.goal.as_ref().is_none_or(|g| key.goal.as_ref() == Some(g))
            && self.task.is_none_or(|t| t.matches(key.task))
            && eq(&self.at_task, &key.at_task)
            && eq(&self.status, &key.status)
            && eq(&self.following, &key.following)
    }

    pub fn is_wildcard(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptRow {
    #[serde(default)]
    pub when: SituationPattern,
    pub then: Distribution<ActionKind>,
}

/// Rows are tried in declared order; the first match wins. A row with an
/// empty pattern acts as the default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionCpt {
    pub rows: Vec<CptRow>,
}

impl ActionCpt {
    pub fn new(rows: Vec<CptRow>) -> Self {
        Self { rows }
    }

    /// A one-row table that always picks `kind`.
    pub fn always(kind: ActionKind) -> Self {
        Self::new(vec![CptRow {
            when: SituationPattern::default(),
            then: Distribution::new(vec![(kind, 1.0)]),
        }])
    }

    pub fn lookup(&self, key: &SituationKey) -> Option<(usize, &CptRow)> {
        self.rows.iter().enumerate().find(|(_, r)| r.when.matches(key))
    }

    pub fn has_default(&self) -> bool {
        self.rows.iter().any(|r| r.when.is_wildcard())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub goal: Option<String>,
    pub action: Action,
    /// Matched row; `None` when a trapped agent fell back to calling for help.
    pub row: Option<usize>,
    /// Entropy in bits of the goal draw plus the action draw.
    pub entropy: f64,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.action.kind())?;
        if let Some(g) = &self.goal {
            write!(f, " for {g}")?;
        }
        Ok(())
    }
}

/// Samples a goal, then an action from the first matching row.
///
/// Exactly two uniforms are drawn from `rng` whatever the outcome. Trapped
/// agents keep only send actions; when none carry mass they call for help.
pub fn decide(
    agent: &AgentState,
    situation: &Situation,
    cpt: &ActionCpt,
    rng: &mut SimRng,
) -> Result<Decision, AgentError> {
    let u_goal = rng.uniform();
    let u_action = rng.uniform();

    let goals = Distribution::from_weights(&agent.goal_weights);
    let goal = goals.sample(u_goal).cloned();
    let goal_entropy = goals.entropy();
    let key = situation.key(goal.as_deref());
    let trapped = agent.status == Status::Trapped;

    let found = cpt.lookup(&key);
    let (row, dist) = match found {
        Some((i, r)) if trapped => (Some(i), r.then.restrict(|k| k.is_send())),
        Some((i, r)) => (Some(i), Some(r.then.clone())),
        None if trapped => (None, None),
        None => return Err(AgentError::MissingRow(key.to_string())),
    };
    let Some(dist) = dist else {
        return Ok(Decision {
            goal,
            action: resolve(ActionKind::SendHelp, agent, situation),
            row: None,
            entropy: goal_entropy,
        });
    };
    let kind = dist
        .sample(u_action)
        .copied()
        .ok_or_else(|| AgentError::MissingRow(key.to_string()))?;
    Ok(Decision {
        goal,
        action: resolve(kind, agent, situation),
        row,
        entropy: goal_entropy + dist.entropy(),
    })
}

/// Fills in targets for `kind` from what the agent can see.
pub fn resolve(kind: ActionKind, agent: &AgentState, s: &Situation) -> Action {
    let adjacent_trapped = s
        .visible
        .iter()
        .find(|v| v.status == Status::Trapped && v.pos.manhattan(s.pos) <= 1);
    let help_task = s.task.filter(|t| t.function == PurposeFunction::HelpTeamMates);
    match kind {
        ActionKind::Forward => Action::MoveForward,
        ActionKind::Backward => Action::MoveBackward,
        ActionKind::TurnLeft => Action::TurnLeft,
        ActionKind::TurnRight => Action::TurnRight,
        ActionKind::Enter => Action::Enter,
        ActionKind::Collect => Action::Collect,
        ActionKind::ChangeColour => {
            let neighbours = [
                (s.on, Some(s.pos)),
                (s.ahead, s.heading.step(s.pos)),
                (s.left, s.heading.left().step(s.pos)),
                (s.right, s.heading.right().step(s.pos)),
                (s.behind, s.heading.reverse().step(s.pos)),
            ];
            let pos = help_task
                .map(|t| t.origin)
                .filter(|p| p.manhattan(s.pos) <= 1)
                .or(adjacent_trapped.map(|v| v.pos))
                .or_else(|| {
                    neighbours
                        .into_iter()
                        .find(|(sense, _)| *sense == CellSense::Red)
                        .and_then(|(_, p)| p)
                });
            Action::ChangeColour { pos }
        }
        ActionKind::Release => Action::Release {
            target: help_task
                .and_then(|t| t.target)
                .or(adjacent_trapped.map(|v| v.id))
                .or(s.trapped_visible),
        },
        ActionKind::Follow => Action::Follow {
            target: agent.follow_target,
        },
        ActionKind::Stop => Action::Stop,
        ActionKind::SendHelp => send(kind, Some(Message::Help { sender: agent.id, pos: agent.pos })),
        ActionKind::SendFollowMe => send(kind, Some(Message::FollowMe { sender: agent.id })),
        ActionKind::SendStopAll => send(kind, Some(Message::StopAll { sender: agent.id })),
        ActionKind::SendTokenSighting => send(kind, s.token_visible.map(|pos| Message::TokenSighting { pos })),
        ActionKind::SendStopped => send(kind, Some(Message::Stopped { sender: agent.id })),
    }
}

fn send(kind: ActionKind, message: Option<Message>) -> Action {
    Action::Send { kind, message }
}

//! Mission model: abstraction hierarchy, values and priority measures, goals,
//! the pre-mission role-to-function map, and the integrity violation rule.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{AgentId, Role};
use crate::world::Position;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MissionError {
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("edge references unknown node {0:?}")]
    UnknownNode(String),
    #[error("edge {upper:?} -> {lower:?} does not join adjacent levels")]
    NonAdjacentEdge { upper: String, lower: String },
    #[error("node {0:?} has no link to the level above")]
    Orphan(String),
    #[error("hierarchy must have exactly one functional purpose, found {0}")]
    FunctionalPurposeCount(usize),
}

/// Levels of the abstraction hierarchy, top to bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    FunctionalPurpose,
    ValuePriorityMeasure,
    PurposeFunction,
    ObjectFunction,
    PhysicalObject,
}

impl Level {
    fn rank(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub level: Level,
    pub label: String,
}

/// Means-ends network. Edges run from the upper node to the lower node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractionHierarchy {
    pub nodes: Vec<Node>,
    pub edges: Vec<(String, String)>,
}

impl AbstractionHierarchy {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn at_level(&self, level: Level) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.level == level)
    }

    pub fn children<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |(upper, _)| upper == id)
            .map(|(_, lower)| lower.as_str())
    }

    /// Whether `upper` serves directly through `lower`.
    pub fn links(&self, upper: &str, lower: &str) -> bool {
        self.edges.iter().any(|(u, l)| u == upper && l == lower)
    }

    /// Checks level adjacency, upward links and the single top node.
    /// Adjacency forces every edge one level down, so the graph is acyclic.
    pub fn validate(&self) -> Result<(), MissionError> {
        let mut levels = BTreeMap::new();
        for n in &self.nodes {
            if levels.insert(n.id.as_str(), n.level).is_some() {
                return Err(MissionError::DuplicateNode(n.id.clone()));
            }
        }
        let tops = self.at_level(Level::FunctionalPurpose).count();
        if tops != 1 {
            return Err(MissionError::FunctionalPurposeCount(tops));
        }
        let mut has_parent = BTreeSet::new();
        for (upper, lower) in &self.edges {
            let u = levels
                .get(upper.as_str())
                .ok_or_else(|| MissionError::UnknownNode(upper.clone()))?;
            let l = levels
                .get(lower.as_str())
                .ok_or_else(|| MissionError::UnknownNode(lower.clone()))?;
            if u.rank() + 1 != l.rank() {
                return Err(MissionError::NonAdjacentEdge {
                    upper: upper.clone(),
                    lower: lower.clone(),
                });
            }
            has_parent.insert(lower.as_str());
        }
        for n in &self.nodes {
            if n.level != Level::FunctionalPurpose && !has_parent.contains(n.id.as_str()) {
                return Err(MissionError::Orphan(n.id.clone()));
            }
        }
        Ok(())
    }

    /// Every node reachable downward from `id`, excluding `id` itself.
    pub fn reachable_from(&self, id: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([id.to_string()]);
        while let Some(cur) = queue.pop_front() {
            for child in self.children(&cur) {
                if seen.insert(child.to_string()) {
                    queue.push_back(child.to_string());
                }
            }
        }
        seen
    }
}

/// Purpose-related functions; the unit of capability, trust and allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurposeFunction {
    MoveThroughMaze,
    HelpTeamMates,
    GatherTokens,
    Communicate,
}

impl PurposeFunction {
    pub const ALL: [PurposeFunction; 4] = [
        PurposeFunction::MoveThroughMaze,
        PurposeFunction::HelpTeamMates,
        PurposeFunction::GatherTokens,
        PurposeFunction::Communicate,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PurposeFunction::MoveThroughMaze => "move_through_maze",
            PurposeFunction::HelpTeamMates => "help_team_mates",
            PurposeFunction::GatherTokens => "gather_tokens",
            PurposeFunction::Communicate => "communicate",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PurposeFunction::MoveThroughMaze => "move through maze",
            PurposeFunction::HelpTeamMates => "help team mates",
            PurposeFunction::GatherTokens => "gather tokens",
            PurposeFunction::Communicate => "communicate",
        }
    }
}

impl fmt::Display for PurposeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PurposeFunction {
    type Err = MissionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = normalize_id(s);
        PurposeFunction::ALL
            .into_iter()
            .find(|f| f.id() == key)
            .ok_or_else(|| MissionError::UnknownFunction(s.to_string()))
    }
}

/// Object-related functions: the concrete activities agents perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectFunction {
    Forward,
    Enter,
    Turn,
    Collect,
    Stop,
    Change,
    Release,
    Follow,
    Message,
}

impl ObjectFunction {
    pub const ALL: [ObjectFunction; 9] = [
        ObjectFunction::Forward,
        ObjectFunction::Enter,
        ObjectFunction::Turn,
        ObjectFunction::Collect,
        ObjectFunction::Stop,
        ObjectFunction::Change,
        ObjectFunction::Release,
        ObjectFunction::Follow,
        ObjectFunction::Message,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ObjectFunction::Forward => "forward",
            ObjectFunction::Enter => "enter",
            ObjectFunction::Turn => "turn",
            ObjectFunction::Collect => "collect",
            ObjectFunction::Stop => "stop",
            ObjectFunction::Change => "change",
            ObjectFunction::Release => "release",
            ObjectFunction::Follow => "follow",
            ObjectFunction::Message => "message",
        }
    }
}

fn normalize_id(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace([' ', '-'], "_")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardness {
    Soft,
    Hard,
}

/// Counter a measure scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Turns spent halted or on side activities.
    Ticks,
    Tokens,
    Gates,
    /// Releases plus honoured follow steps.
    Teamwork,
}

/// Inclusive rectangle of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Zone {
    pub fn contains(&self, p: Position) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuePriorityMeasure {
    pub name: String,
    pub direction: Direction,
    #[serde(default = "soft")]
    pub hardness: Hardness,
    pub metric: Metric,
    /// Zoned measures are absolute limits: they apply to every action inside
    /// the zone whether or not a contract is held.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<Zone>,
}

fn soft() -> Hardness {
    Hardness::Soft
}

impl ValuePriorityMeasure {
    pub fn soft(name: &str, direction: Direction, metric: Metric) -> Self {
        Self {
            name: name.to_string(),
            direction,
            hardness: Hardness::Soft,
            metric,
            zone: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessPredicate {
    AllEscaped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamGoal {
    pub label: String,
    pub predicate: SuccessPredicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalTag {
    Selfish,
    Altruistic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndividualGoal {
    pub role: Role,
    pub label: String,
    pub tag: GoalTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub team_goal: TeamGoal,
    pub individual_goals: Vec<IndividualGoal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationEntry {
    pub role: Role,
    pub function: String,
    pub allocated: bool,
}

/// Static role-to-function allocation made before the mission.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AllocationMap {
    pub entries: Vec<AllocationEntry>,
}

impl AllocationMap {
    /// Purpose functions go to every role `capable` admits; object functions
    /// go to the roles holding any purpose function above them.
    pub fn derive(hierarchy: &AbstractionHierarchy, capable: impl Fn(Role, PurposeFunction) -> bool) -> Self {
        let mut entries = Vec::new();
        for pf in PurposeFunction::ALL {
            for role in Role::ALL {
                entries.push(AllocationEntry {
                    role,
                    function: pf.id().to_string(),
                    allocated: capable(role, pf),
                });
            }
        }
        for of in hierarchy.at_level(Level::ObjectFunction) {
            for role in Role::ALL {
                let allocated = PurposeFunction::ALL
                    .into_iter()
                    .any(|pf| capable(role, pf) && hierarchy.links(pf.id(), &of.id));
                entries.push(AllocationEntry {
                    role,
                    function: of.id.clone(),
                    allocated,
                });
            }
        }
        Self { entries }
    }

    /// Functions named in the map that no role is allocated to.
    pub fn unassigned(&self) -> BTreeSet<&str> {
        let named: BTreeSet<&str> = self.entries.iter().map(|e| e.function.as_str()).collect();
        named
            .into_iter()
            .filter(|f| !self.entries.iter().any(|e| e.function == *f && e.allocated))
            .collect()
    }
}

/// Roles the pre-mission map allocates to `function` (id or label).
pub fn soca_allocated_roles(function: &str, map: &AllocationMap) -> Result<Vec<Role>, MissionError> {
    let key = normalize_id(function);
    let mut known = false;
    let mut roles = Vec::new();
    for e in map.entries.iter().filter(|e| e.function == key) {
        known = true;
        if e.allocated && !roles.contains(&e.role) {
            roles.push(e.role);
        }
    }
    if !known {
        return Err(MissionError::UnknownFunction(function.to_string()));
    }
    Ok(roles)
}

pub const FUNCTIONAL_PURPOSE: &str = "solve_the_maze";
pub const MINIMISE_TIME: &str = "minimise_time";
pub const MAXIMISE_TOKENS: &str = "maximise_tokens";
pub const MINIMISE_GATE: &str = "minimise_gate";
pub const MAXIMISE_TEAMWORK: &str = "maximise_teamwork";

/// Default mission for the maze task.
pub fn build_default_mission() -> (AbstractionHierarchy, Vec<ValuePriorityMeasure>, GoalSpec) {
    let node = |id: &str, level, label: &str| Node {
        id: id.to_string(),
        level,
        label: label.to_string(),
    };
    let mut nodes = vec![node(FUNCTIONAL_PURPOSE, Level::FunctionalPurpose, "solve the maze")];
    let vpms = vec![
        ValuePriorityMeasure::soft(MINIMISE_TIME, Direction::Minimize, Metric::Ticks),
        ValuePriorityMeasure::soft(MAXIMISE_TOKENS, Direction::Maximize, Metric::Tokens),
        ValuePriorityMeasure::soft(MINIMISE_GATE, Direction::Minimize, Metric::Gates),
        ValuePriorityMeasure::soft(MAXIMISE_TEAMWORK, Direction::Maximize, Metric::Teamwork),
    ];
    for v in &vpms {
        nodes.push(node(&v.name, Level::ValuePriorityMeasure, &v.name.replace('_', " ")));
    }
    for pf in PurposeFunction::ALL {
        nodes.push(node(pf.id(), Level::PurposeFunction, pf.label()));
    }
    for of in ObjectFunction::ALL {
        nodes.push(node(of.id(), Level::ObjectFunction, of.id()));
    }
    let objects = [
        ("black_square", "black square (path)"),
        ("blue_square", "blue square (wall)"),
        ("red_square", "red square (token or trap)"),
        ("gate", "gate"),
        ("exit", "exit"),
        ("teammate", "teammate"),
    ];
    for (id, label) in objects {
        nodes.push(node(id, Level::PhysicalObject, label));
    }

    let mut edges: Vec<(String, String)> = Vec::new();
    let mut link = |a: &str, b: &str| edges.push((a.to_string(), b.to_string()));
    for v in &vpms {
        link(FUNCTIONAL_PURPOSE, &v.name);
    }
    link(MINIMISE_TIME, "move_through_maze");
    link(MINIMISE_TIME, "communicate");
    link(MAXIMISE_TOKENS, "gather_tokens");
    link(MINIMISE_GATE, "move_through_maze");
    link(MAXIMISE_TEAMWORK, "help_team_mates");
    link(MAXIMISE_TEAMWORK, "communicate");
    link(MAXIMISE_TEAMWORK, "move_through_maze");

    for of in ["forward", "turn", "enter", "stop", "follow"] {
        link("move_through_maze", of);
    }
    for of in ["forward", "turn", "release", "change"] {
        link("help_team_mates", of);
    }
    for of in ["forward", "turn", "collect", "stop"] {
        link("gather_tokens", of);
    }
    for of in ["message", "follow"] {
        link("communicate", of);
    }

    for of in ["forward", "turn"] {
        link(of, "black_square");
        link(of, "blue_square");
    }
    link("forward", "exit");
    link("enter", "gate");
    for of in ["stop", "collect", "change", "release"] {
        link(of, "red_square");
    }
    link("follow", "teammate");
    link("message", "teammate");

    let hierarchy = AbstractionHierarchy { nodes, edges };
    let goals = GoalSpec {
        team_goal: TeamGoal {
            label: "shortest route whereby all team members escape".to_string(),
            predicate: SuccessPredicate::AllEscaped,
        },
        individual_goals: vec![
            IndividualGoal {
                role: Role::Collector,
                label: "collect tokens".to_string(),
                tag: GoalTag::Selfish,
            },
            IndividualGoal {
                role: Role::GateUser,
                label: "enter gates".to_string(),
                tag: GoalTag::Selfish,
            },
            IndividualGoal {
                role: Role::Neutral,
                label: "release trapped teammates".to_string(),
                tag: GoalTag::Altruistic,
            },
        ],
    };
    (hierarchy, vpms, goals)
}

/// Change an action made to each counter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDeltas {
    pub ticks: i32,
    pub tokens: i32,
    pub gates: i32,
    pub teamwork: i32,
}

impl MetricDeltas {
    pub fn get(&self, metric: Metric) -> i32 {
        match metric {
            Metric::Ticks => self.ticks,
            Metric::Tokens => self.tokens,
            Metric::Gates => self.gates,
            Metric::Teamwork => self.teamwork,
        }
    }
}

/// A completed agent action, reduced to what the violation rule needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSummary {
    pub tick: u64,
    pub agent: AgentId,
    pub function: ObjectFunction,
    pub pos: Position,
    pub deltas: MetricDeltas,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vpm: String,
    pub agent: AgentId,
    pub severity: Hardness,
}

/// Measures the action violated.
///
/// A measure is degraded when its counter moves the wrong way (up for
/// minimize, down for maximize). A zoned measure is violated by any degrading
/// action inside its zone. An unzoned measure is violated only when the agent
/// holds accepted contracts (`held`) and none of their functions links to the
/// action's object function.
pub fn check_violation(
    action: &ActionSummary,
    vpms: &[ValuePriorityMeasure],
    held: &[PurposeFunction],
    hierarchy: &AbstractionHierarchy,
) -> Vec<Violation> {
    let justified = held
        .iter()
        .any(|pf| hierarchy.links(pf.id(), action.function.id()));
    vpms.iter()
        .filter(|vpm| {
            let delta = action.deltas.get(vpm.metric);
            let degraded = match vpm.direction {
                Direction::Minimize => delta > 0,
                Direction::Maximize => delta < 0,
            };
            degraded
                && match vpm.zone {
                    Some(zone) => zone.contains(action.pos),
                    None => !held.is_empty() && !justified,
                }
        })
        .map(|vpm| Violation {
            vpm: vpm.name.clone(),
            agent: action.agent,
            severity: vpm.hardness,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trust::CapabilityMatrix;

    fn default_map(h: &AbstractionHierarchy) -> AllocationMap {
        let cap = CapabilityMatrix::default();
        AllocationMap::derive(h, |r, f| cap.performer(r, f) > 0)
    }

    #[test]
    fn default_mission_shape() {
        let (h, vpms, goals) = build_default_mission();
        h.validate().unwrap();
        assert_eq!(h.at_level(Level::PurposeFunction).count(), 4);
        assert_eq!(h.at_level(Level::ObjectFunction).count(), 9);
        assert_eq!(vpms.len(), 4);
        assert!(vpms.iter().all(|v| v.hardness == Hardness::Soft));
        assert_eq!(goals.team_goal.predicate, SuccessPredicate::AllEscaped);
    }

    #[test]
    fn every_object_function_reachable_from_purpose() {
        let (h, _, _) = build_default_mission();
        let reach = h.reachable_from(FUNCTIONAL_PURPOSE);
        for of in ObjectFunction::ALL {
            assert!(reach.contains(of.id()), "{} unreachable", of.id());
        }
    }

    #[test]
    fn validation_rejects_bad_edges() {
        let (mut h, _, _) = build_default_mission();
        h.edges.push((FUNCTIONAL_PURPOSE.into(), "collect".into()));
        assert!(matches!(h.validate(), Err(MissionError::NonAdjacentEdge { .. })));

        let (mut h, _, _) = build_default_mission();
        h.nodes.push(Node {
            id: "lonely".into(),
            level: Level::ObjectFunction,
            label: "lonely".into(),
        });
        assert_eq!(h.validate(), Err(MissionError::Orphan("lonely".into())));

        let (mut h, _, _) = build_default_mission();
        h.edges.push(("collect".into(), "nowhere".into()));
        assert_eq!(h.validate(), Err(MissionError::UnknownNode("nowhere".into())));
    }

    #[test]
    fn soca_roles() {
        let (h, _, _) = build_default_mission();
        let map = default_map(&h);
        assert_eq!(soca_allocated_roles("gather tokens", &map).unwrap(), vec![Role::Collector]);
        assert_eq!(soca_allocated_roles("move_through_maze", &map).unwrap(), Role::ALL.to_vec());
        assert_eq!(
            soca_allocated_roles("collect", &map).unwrap(),
            vec![Role::Collector]
        );
        assert!(matches!(
            soca_allocated_roles("fly", &map),
            Err(MissionError::UnknownFunction(_))
        ));
        assert!(map.unassigned().is_empty());
    }

    fn summary(function: ObjectFunction, deltas: MetricDeltas) -> ActionSummary {
        ActionSummary {
            tick: 3,
            agent: 1,
            function,
            pos: Position::new(4, 2),
            deltas,
        }
    }

    #[test]
    fn collect_under_follow_contract_is_soft_violation() {
        let (h, vpms, _) = build_default_mission();
        let action = summary(
            ObjectFunction::Collect,
            MetricDeltas {
                ticks: 1,
                tokens: 1,
                ..Default::default()
            },
        );
        let v = check_violation(&action, &vpms, &[PurposeFunction::MoveThroughMaze], &h);
        assert_eq!(
            v,
            vec![Violation {
                vpm: MINIMISE_TIME.into(),
                agent: 1,
                severity: Hardness::Soft
            }]
        );
        // the same collect is part of a gather contract
        let v = check_violation(
            &action,
            &vpms,
            &[PurposeFunction::MoveThroughMaze, PurposeFunction::GatherTokens],
            &h,
        );
        assert!(v.is_empty());
    }

    #[test]
    fn forward_without_contract_is_clean() {
        let (h, vpms, _) = build_default_mission();
        let action = summary(ObjectFunction::Forward, MetricDeltas::default());
        assert!(check_violation(&action, &vpms, &[], &h).is_empty());
        let gate = summary(
            ObjectFunction::Forward,
            MetricDeltas {
                gates: 1,
                ..Default::default()
            },
        );
        assert!(check_violation(&gate, &vpms, &[], &h).is_empty());
    }

    #[test]
    fn zoned_hard_measure_fires_without_contract() {
        let (h, mut vpms, _) = build_default_mission();
        vpms.push(ValuePriorityMeasure {
            name: "no_pickup_in_zone".into(),
            direction: Direction::Minimize,
            hardness: Hardness::Hard,
            metric: Metric::Tokens,
            zone: Some(Zone {
                x0: 3,
                y0: 1,
                x1: 5,
                y1: 3,
            }),
        });
        let action = summary(
            ObjectFunction::Collect,
            MetricDeltas {
                ticks: 1,
                tokens: 1,
                ..Default::default()
            },
        );
        let v = check_violation(&action, &vpms, &[], &h);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].severity, Hardness::Hard);
        let outside = ActionSummary {
            pos: Position::new(9, 9),
            ..action
        };
        assert!(check_violation(&outside, &vpms, &[], &h).is_empty());
    }

    #[test]
    fn lost_token_degrades_maximise_tokens() {
        let (h, vpms, _) = build_default_mission();
        let action = summary(
            ObjectFunction::Change,
            MetricDeltas {
                ticks: 1,
                tokens: -1,
                ..Default::default()
            },
        );
        let names: Vec<_> = check_violation(&action, &vpms, &[PurposeFunction::GatherTokens], &h)
            .into_iter()
            .map(|v| v.vpm)
            .collect();
        assert_eq!(names, vec![MINIMISE_TIME.to_string(), MAXIMISE_TOKENS.to_string()]);
    }
}

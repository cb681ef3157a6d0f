//! Detection: what an agent knows at the start of its turn.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AgentId, AgentState, Message, Observation, Role, Status};
use crate::mission::PurposeFunction;
use crate::world::{wall_follow_step, CellKind, Heading, Maze, Position};

/// Raw cell reading. Roles attach their own meaning through the
/// interpretation table; the reading itself is common to everyone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSense {
    Open,
    Wall,
    Red,
    Gate,
    Exit,
}

impl CellSense {
    pub fn of(kind: CellKind) -> Self {
        match kind {
            CellKind::Wall => CellSense::Wall,
            CellKind::RedSquare { active: true } => CellSense::Red,
            CellKind::Gate => CellSense::Gate,
            CellKind::Exit => CellSense::Exit,
            CellKind::Path | CellKind::Start | CellKind::RedSquare { active: false } => CellSense::Open,
        }
    }

    pub fn observation(self) -> Observation {
        match self {
            CellSense::Open => Observation::BlackSquare,
            CellSense::Wall => Observation::BlueSquare,
            CellSense::Red => Observation::RedSquare,
            CellSense::Gate => Observation::Gate,
            CellSense::Exit => Observation::Exit,
        }
    }
}

/// Most urgent message in the inbox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InboxSummary {
    Empty,
    Help,
    StopAll,
    TokenSighting,
    FollowMe,
    Stopped,
}

impl InboxSummary {
    pub fn of(inbox: &[Message]) -> Self {
        let rank = |m: &Message| match m {
            Message::Help { .. } => (0, InboxSummary::Help),
            Message::StopAll { .. } => (1, InboxSummary::StopAll),
            Message::TokenSighting { .. } => (2, InboxSummary::TokenSighting),
            Message::FollowMe { .. } => (3, InboxSummary::FollowMe),
            Message::Stopped { .. } => (4, InboxSummary::Stopped),
        };
        inbox
            .iter()
            .map(rank)
            .min_by_key(|(r, _)| *r)
            .map_or(InboxSummary::Empty, |(_, s)| s)
    }
}

/// The contract an agent is currently performing, as the agent sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskView {
    pub function: PurposeFunction,
    pub origin: Position,
    /// Teammate to release, for help contracts.
    pub target: Option<AgentId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptionContext {
    pub tick: u64,
    pub visibility_radius: usize,
    pub time_bucket_ticks: u64,
    pub task: Option<TaskView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seen {
    pub id: AgentId,
    pub role: Role,
    pub pos: Position,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Situation {
    pub tick: u64,
    pub pos: Position,
    pub heading: Heading,
    pub status: Status,
    pub on: CellSense,
    pub ahead: CellSense,
    pub left: CellSense,
    pub right: CellSense,
    pub behind: CellSense,
    /// Reading of the cell the hand rule would step into.
    pub next: CellSense,
    pub visible: Vec<Seen>,
    /// Nearest visible trapped teammate.
    pub trapped_visible: Option<AgentId>,
    /// Nearest active red square within the visibility radius.
    pub token_visible: Option<Position>,
    pub inbox: Vec<Message>,
    pub time_bucket: u32,
    pub task: Option<TaskView>,
    pub at_task: bool,
    pub follow_target: Option<AgentId>,
}

impl Situation {
    /// Observations of the four-neighbourhood, own cell, visible trapped
    /// teammates and inbox, with where each was made.
    pub fn observations(&self) -> Vec<(Observation, Position)> {
        let mut out = vec![(self.on.observation(), self.pos)];
        let around = [
            (self.heading, self.ahead),
            (self.heading.left(), self.left),
            (self.heading.right(), self.right),
            (self.heading.reverse(), self.behind),
        ];
        for (dir, sense) in around {
            if let Some(p) = dir.step(self.pos) {
                out.push((sense.observation(), p));
            }
        }
        for s in &self.visible {
            if s.status == Status::Trapped {
                out.push((Observation::TrappedTeammate, s.pos));
            }
        }
        for m in &self.inbox {
            let at = match *m {
                Message::Help { pos, .. } | Message::TokenSighting { pos } => pos,
                _ => self.pos,
            };
            out.push((m.observation(), at));
        }
        out
    }

    /// Compact key matched against CPT rows.
    pub fn key(&self, goal: Option<&str>) -> SituationKey {
        SituationKey {
            on: self.on,
            ahead: self.ahead,
            next: self.next,
            trapped_visible: self.trapped_visible.is_some(),
            token_visible: self.token_visible.is_some(),
            inbox: InboxSummary::of(&self.inbox),
            time_bucket: self.time_bucket,
            goal: goal.map(str::to_string),
            task: self.task.map(|t| t.function),
            at_task: self.at_task,
            status: self.status,
            following: self.follow_target.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SituationKey {
    pub on: CellSense,
    pub ahead: CellSense,
    pub next: CellSense,
    pub trapped_visible: bool,
    pub token_visible: bool,
    pub inbox: InboxSummary,
    pub time_bucket: u32,
    pub goal: Option<String>,
    pub task: Option<PurposeFunction>,
    pub at_task: bool,
    pub status: Status,
    pub following: bool,
}

impl fmt::Display for SituationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // serde_json never fails on this plain struct
        let text = serde_json::to_string(self).map_err(|_| fmt::Error)?;
        f.write_str(&text)
    }
}

/// Builds the situation for `agent` from the world and its inbox.
pub fn perceive(
    agent: &AgentState,
    maze: &Maze,
    others: &[AgentState],
    inbox: &[Message],
    ctx: &PerceptionContext,
) -> Situation {
    let read = |dir: Heading| {
        dir.step(agent.pos)
            .map_or(CellSense::Wall, |p| CellSense::of(maze.kind(p)))
    };
    let (next_pos, _) = wall_follow_step(maze, agent.pos, agent.heading, agent.hand);
    let next = if next_pos == agent.pos {
        CellSense::Wall
    } else {
        CellSense::of(maze.kind(next_pos))
    };

    let radius = ctx.visibility_radius;
    let mut visible: Vec<Seen> = others
        .iter()
        .filter(|o| o.id != agent.id && !o.is_escaped() && o.pos.manhattan(agent.pos) <= radius)
        .map(|o| Seen {
            id: o.id,
            role: o.role,
            pos: o.pos,
            status: o.status,
        })
        .collect();
    visible.sort_by_key(|s| (s.pos.manhattan(agent.pos), s.id));
    let trapped_visible = visible.iter().find(|s| s.status == Status::Trapped).map(|s| s.id);

    let token_visible = maze
        .positions()
        .filter(|p| p.manhattan(agent.pos) <= radius && maze.kind(*p).is_active_red())
        .min_by_key(|p| (p.manhattan(agent.pos), p.y, p.x));

    let width = ctx.time_bucket_ticks.max(1);
    let time_bucket = (ctx.tick.saturating_sub(1) / width + 1) as u32;
    let at_task = ctx.task.is_some_and(|t| t.origin.manhattan(agent.pos) <= 1);

    Situation {
        tick: ctx.tick,
        pos: agent.pos,
        heading: agent.heading,
        status: agent.status,
        on: CellSense::of(maze.kind(agent.pos)),
        ahead: read(agent.heading),
        left: read(agent.heading.left()),
        right: read(agent.heading.right()),
        behind: read(agent.heading.reverse()),
        next,
        visible,
        trapped_visible,
        token_visible,
        inbox: inbox.to_vec(),
        time_bucket,
        task: ctx.task,
        at_task,
        follow_target: agent.follow_target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{interpret, InterpretationTable, Meaning};
    use crate::world::{load_maze, Hand};

    fn ctx(tick: u64) -> PerceptionContext {
        PerceptionContext {
            tick,
            visibility_radius: 3,
            time_bucket_ticks: 50,
            task: None,
        }
    }

    #[test]
    fn corridor_reading() {
        let maze = load_maze("#######\n#S...E#\n#######").unwrap();
        let a = AgentState::new(0, Role::Leader, Position::new(2, 1), Heading::East, Hand::Left);
        let s = perceive(&a, &maze, std::slice::from_ref(&a), &[], &ctx(1));
        assert_eq!((s.left, s.right, s.ahead), (CellSense::Wall, CellSense::Wall, CellSense::Open));
        assert_eq!(s.next, CellSense::Open);
        assert!(s.inbox.is_empty());
        assert_eq!(InboxSummary::of(&s.inbox), InboxSummary::Empty);
    }

    #[test]
    fn collector_sees_collectible() {
        let maze = load_maze("#######\n#S.T.E#\n#######").unwrap();
        let a = AgentState::new(1, Role::Collector, Position::new(2, 1), Heading::East, Hand::Left);
        let s = perceive(&a, &maze, &[], &[], &ctx(1));
        assert_eq!(s.ahead, CellSense::Red);
        assert_eq!(s.token_visible, Some(Position::new(3, 1)));
        let table = InterpretationTable::default();
        assert!(s
            .observations()
            .iter()
            .any(|(o, p)| *p == Position::new(3, 1)
                && interpret(&table, Role::Collector, *o) == Ok(Meaning::Collectible)));
    }

    #[test]
    fn time_buckets_and_inbox_priority() {
        let maze = load_maze("#####\n#S.E#\n#####").unwrap();
        let a = AgentState::new(0, Role::Neutral, Position::new(1, 1), Heading::East, Hand::Left);
        let inbox = [
            Message::FollowMe { sender: 0 },
            Message::Help {
                sender: 2,
                pos: Position::new(1, 1),
            },
        ];
        assert_eq!(perceive(&a, &maze, &[], &inbox, &ctx(50)).time_bucket, 1);
        let s = perceive(&a, &maze, &[], &inbox, &ctx(51));
        assert_eq!(s.time_bucket, 2);
        assert_eq!(s.key(None).inbox, InboxSummary::Help);
    }

    #[test]
    fn trapped_teammates_in_range() {
        let maze = load_maze("########\n#S....E#\n########").unwrap();
        let me = AgentState::new(0, Role::Neutral, Position::new(1, 1), Heading::East, Hand::Left);
        let mut near = AgentState::new(1, Role::Leader, Position::new(3, 1), Heading::East, Hand::Left);
        near.status = Status::Trapped;
        let mut far = AgentState::new(2, Role::GateUser, Position::new(5, 1), Heading::East, Hand::Left);
        far.status = Status::Trapped;
        let s = perceive(&me, &maze, &[me.clone(), near, far], &[], &ctx(1));
        assert_eq!(s.trapped_visible, Some(1));
        assert_eq!(s.visible.len(), 1);
    }
}

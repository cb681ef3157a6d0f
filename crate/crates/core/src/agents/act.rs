//! Action execution against the world.

use super::perceive::TaskView;
use super::{Action, ActionKind, AgentId, AgentState, Message, Status};
use crate::event::EventKind;
use crate::mission::PurposeFunction;
use crate::trust::CapabilityMatrix;
use crate::world::{wall_follow_step, Heading, Maze, Passability, Position, RouteStep};

#[derive(Debug, Clone, Copy)]
pub struct ActionContext<'a> {
    pub capability: &'a CapabilityMatrix,
    /// Contract the actor is performing, if any.
    pub task: Option<TaskView>,
    /// The action was forced by the scenario script.
    pub scripted: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActionOutcome {
    /// The turn record first, then any consequences.
    pub events: Vec<EventKind>,
    /// Message to deliver next tick.
    pub sent: Option<Message>,
}

impl ActionOutcome {
    fn failed(agent: AgentId, action: ActionKind, reason: &str) -> Self {
        Self {
            events: vec![EventKind::ActionFailed {
                agent,
                action,
                reason: reason.to_string(),
            }],
            sent: None,
        }
    }
}

/// Whether `agent` can stand on an active red square without being trapped.
fn walks_on_red(agent: &AgentState, capability: &CapabilityMatrix) -> bool {
    capability.performer(agent.role, PurposeFunction::GatherTokens) > 0
}

fn passability(agent: &AgentState, capability: &CapabilityMatrix) -> Passability {
    if walks_on_red(agent, capability) {
        Passability::Open
    } else {
        Passability::AvoidTraps
    }
}

/// Applies one action for `actor`. Illegal actions leave the state
/// unchanged and produce a single `ActionFailed` record.
pub fn apply_action(
    maze: &mut Maze,
    agents: &mut [AgentState],
    actor: AgentId,
    action: Action,
    ctx: &ActionContext<'_>,
) -> ActionOutcome {
    let kind = action.kind();
    let me = agents[actor].clone();
    debug_assert!(!me.is_escaped(), "escaped agents take no turns");

    if me.is_trapped() && !matches!(action, Action::Send { .. } | Action::Stop) {
        return ActionOutcome::failed(actor, kind, "agent is trapped");
    }
    let help_score = ctx.capability.performer(me.role, PurposeFunction::HelpTeamMates);

    match action {
        Action::MoveForward => {
            let rule = passability(&me, ctx.capability);
            let routed = ctx.task.and_then(|t| {
                if t.function == PurposeFunction::MoveThroughMaze || t.origin.manhattan(me.pos) <= 1 {
                    return None;
                }
                let reach = if t.function == PurposeFunction::GatherTokens && rule == Passability::Open {
                    0
                } else {
                    1
                };
                match maze.route_step(me.pos, t.origin, reach, rule) {
                    RouteStep::Next(p) => Some(p),
                    _ => None,
                }
            });
            let (to, heading) = match routed {
                Some(p) => (p, Heading::towards(me.pos, p).unwrap_or(me.heading)),
                None => wall_follow_step(maze, me.pos, me.heading, me.hand),
            };
            step(maze, agents, actor, kind, to, heading, ctx.capability)
        }
        Action::MoveBackward => turn(agents, actor, kind, me.heading.reverse()),
        Action::TurnLeft => turn(agents, actor, kind, me.heading.left()),
        Action::TurnRight => turn(agents, actor, kind, me.heading.right()),
        Action::Enter => {
            let dirs = [
                me.heading,
                me.hand.turn(me.heading),
                me.hand.opposite().turn(me.heading),
            ];
            let gate = dirs.into_iter().find_map(|d| {
                d.step(me.pos)
                    .filter(|p| maze.kind(*p) == crate::world::CellKind::Gate)
                    .map(|p| (p, d))
            });
            match gate {
                Some((p, d)) => step(maze, agents, actor, kind, p, d, ctx.capability),
                None => ActionOutcome::failed(actor, kind, "no gate ahead or to either side"),
            }
        }
        Action::Collect => {
            if ctx.capability.performer(me.role, PurposeFunction::GatherTokens) == 0 {
                return ActionOutcome::failed(actor, kind, "role cannot gather tokens");
            }
            let task_origin = ctx
                .task
                .filter(|t| t.function == PurposeFunction::GatherTokens)
                .map(|t| t.origin);
            let around = [
                me.heading,
                me.hand.turn(me.heading),
                me.hand.opposite().turn(me.heading),
                me.heading.reverse(),
            ]
            .into_iter()
            .filter_map(|d| d.step(me.pos));
            let target = task_origin
                .into_iter()
                .chain(std::iter::once(me.pos))
                .chain(around)
                .find(|p| p.manhattan(me.pos) <= 1 && maze.kind(*p).is_active_red());
            let Some(pos) = target else {
                return ActionOutcome::failed(actor, kind, "no active red square in reach");
            };
            // `pos` came from the grid, so it is in bounds
            let _ = maze.deactivate_red(pos);
            agents[actor].tokens_collected += 1;
            agents[actor].status = unhalt(agents[actor].status);
            ActionOutcome {
                events: vec![EventKind::Collected { agent: actor, pos }],
                sent: None,
            }
        }
        Action::ChangeColour { pos } => {
            if help_score == 0 {
                return ActionOutcome::failed(actor, kind, "role cannot help team mates");
            }
            let Some(pos) = pos.filter(|p| p.manhattan(me.pos) <= 1) else {
                return ActionOutcome::failed(actor, kind, "no red square in reach");
            };
            let occupied = agents.iter().any(|a| a.pos == pos && a.is_trapped());
            if !maze.kind(pos).is_active_red() && !occupied {
                return ActionOutcome::failed(actor, kind, "square is not red");
            }
            release_at(maze, agents, actor, kind, pos)
        }
        Action::Release { target } => {
            if help_score == 0 {
                return ActionOutcome::failed(actor, kind, "role cannot help team mates");
            }
            let Some(t) = target.filter(|t| *t != actor && *t < agents.len()) else {
                return ActionOutcome::failed(actor, kind, "no trapped teammate to release");
            };
            if !agents[t].is_trapped() {
                return ActionOutcome::failed(actor, kind, "target is not trapped");
            }
            if agents[t].pos.manhattan(me.pos) > 1 {
                return ActionOutcome::failed(actor, kind, "target is not adjacent");
            }
            let pos = agents[t].pos;
            release_at(maze, agents, actor, kind, pos)
        }
        Action::Follow { target } => {
            let Some(t) = target.filter(|t| *t != actor && *t < agents.len()) else {
                return ActionOutcome::failed(actor, kind, "no one to follow");
            };
            let rule = passability(&me, ctx.capability);
            let goal = agents[t].pos;
            let reach = match rule {
                Passability::AvoidTraps if maze.kind(goal).is_active_red() => 1,
                _ => 0,
            };
            match maze.route_step(me.pos, goal, reach, rule) {
                RouteStep::Next(p) => {
                    let heading = Heading::towards(me.pos, p).unwrap_or(me.heading);
                    step(maze, agents, actor, kind, p, heading, ctx.capability)
                }
                RouteStep::Arrived => turn(agents, actor, kind, me.heading),
                RouteStep::Unreachable => ActionOutcome::failed(actor, kind, "target unreachable"),
            }
        }
        Action::Stop => {
            if agents[actor].status == Status::Active {
                agents[actor].status = Status::Stopped;
            }
            ActionOutcome {
                events: vec![EventKind::Stopped {
                    agent: actor,
                    scripted: ctx.scripted,
                }],
                sent: None,
            }
        }
        Action::Send { message, .. } => match message {
            Some(m) => ActionOutcome {
                events: vec![EventKind::MessageSent {
                    agent: actor,
                    message: m,
                }],
                sent: Some(m),
            },
            None => ActionOutcome::failed(actor, kind, "nothing to report"),
        },
    }
}

fn unhalt(status: Status) -> Status {
    if status == Status::Stopped {
        Status::Active
    } else {
        status
    }
}

/// Reorientation in place.
fn turn(agents: &mut [AgentState], actor: AgentId, kind: ActionKind, heading: Heading) -> ActionOutcome {
    let a = &mut agents[actor];
    a.heading = heading;
    a.status = unhalt(a.status);
    ActionOutcome {
        events: vec![EventKind::Moved {
            agent: actor,
            action: kind,
            from: a.pos,
            to: a.pos,
            heading,
        }],
        sent: None,
    }
}

/// Moves `actor` to `to` and records what it walked into.
fn step(
    maze: &Maze,
    agents: &mut [AgentState],
    actor: AgentId,
    kind: ActionKind,
    to: Position,
    heading: Heading,
    capability: &CapabilityMatrix,
) -> ActionOutcome {
    let from = agents[actor].pos;
    let immune = walks_on_red(&agents[actor], capability);
    let a = &mut agents[actor];
    a.pos = to;
    a.heading = heading;
    a.status = unhalt(a.status);
    let mut events = vec![EventKind::Moved {
        agent: actor,
        action: kind,
        from,
        to,
        heading,
    }];
    if to != from {
        let cell = maze.kind(to);
        if cell.is_active_red() && !immune {
            a.status = Status::Trapped;
            events.push(EventKind::Trapped { agent: actor, pos: to });
        } else if cell == crate::world::CellKind::Gate {
            a.gates_entered += 1;
            events.push(EventKind::GateEntered { agent: actor, pos: to });
        } else if cell == crate::world::CellKind::Exit {
            a.status = Status::Escaped;
            events.push(EventKind::Escaped { agent: actor, pos: to });
        }
    }
    ActionOutcome { events, sent: None }
}

/// Turns the square at `pos` black and frees everyone trapped on it.
fn release_at(
    maze: &mut Maze,
    agents: &mut [AgentState],
    actor: AgentId,
    kind: ActionKind,
    pos: Position,
) -> ActionOutcome {
    let deactivated = maze.deactivate_red(pos).unwrap_or(false);
    let mut freed = Vec::new();
    for a in agents.iter_mut() {
        if a.pos == pos && a.is_trapped() {
            a.status = Status::Active;
            freed.push(a.id);
        }
    }
    agents[actor].status = unhalt(agents[actor].status);
    ActionOutcome {
        events: vec![EventKind::Released {
            agent: actor,
            via: kind,
            pos,
            freed,
            deactivated,
        }],
        sent: None,
    }
}

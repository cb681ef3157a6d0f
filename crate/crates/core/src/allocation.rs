//! Dynamic allocation of function.
//!
//! A request for a purpose function is ranked over the team by
//! capability, availability and trust. Candidates the team does not trust
//! enough are filtered out, and the choice is offered as a contract that
//! every affected teammate must accept.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{AgentId, AgentState};
use crate::mission::PurposeFunction;
use crate::trust::{Side, TrustChange, TrustModel};
use crate::world::{Maze, Position};

pub type ContractId = u64;

/// The concrete need behind a request; decides when a contract is met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Need {
    /// Free a trapped teammate.
    Release { agent: AgentId },
    /// Pick up the token at a square.
    Token { pos: Position },
    /// Lead the team to the exit.
    Lead,
    /// Send any message.
    Communicate,
}

impl Need {
    pub fn function(self) -> PurposeFunction {
        match self {
            Need::Release { .. } => PurposeFunction::HelpTeamMates,
            Need::Token { .. } => PurposeFunction::GatherTokens,
            Need::Lead => PurposeFunction::MoveThroughMaze,
            Need::Communicate => PurposeFunction::Communicate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requester {
    System,
    Agent(AgentId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionRequest {
    pub function: PurposeFunction,
    pub need: Need,
    pub origin: Position,
    pub requested_at: u64,
    pub requester: Requester,
}

impl FunctionRequest {
    pub fn new(need: Need, origin: Position, requested_at: u64, requester: Requester) -> Self {
        Self {
            function: need.function(),
            need,
            origin,
            requested_at,
            requester,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Suitability {
    pub capability_norm: f64,
    pub availability: f64,
    pub product: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractStatus {
    Proposed,
    Accepted,
    Rejected,
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub id: ContractId,
    pub request: FunctionRequest,
    pub performer: AgentId,
    pub supporters: Vec<AgentId>,
    pub affected: Vec<AgentId>,
    pub status: ContractStatus,
    pub decided_at: Option<u64>,
    /// Last tick by which the need must be met.
    pub deadline: Option<u64>,
}

impl Contract {
    pub fn function(&self) -> PurposeFunction {
        self.request.function
    }

    pub fn is_active(&self) -> bool {
        self.status == ContractStatus::Accepted
    }

    /// Whether `agent` is bound by this accepted contract.
    pub fn binds(&self, agent: AgentId) -> bool {
        self.is_active() && (self.performer == agent || self.affected.contains(&agent))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    Incapable,
    Unavailable,
    HardViolation,
    BelowMinRung,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub agent: AgentId,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub agent: AgentId,
    pub suitability: Suitability,
    pub trust: f64,
    pub mean_rung: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub ordered: Vec<Candidate>,
    pub excluded: Vec<Exclusion>,
    /// Best candidate on suitability alone, ignoring trust.
    pub trust_blind_best: Option<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("no capable candidate for {function}")]
    NoCapableCandidate {
        function: PurposeFunction,
        exclusions: Vec<Exclusion>,
    },
    #[error("contract {contract} is {status:?}")]
    InvalidState {
        contract: ContractId,
        status: ContractStatus,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Triggers {
    /// Raise a help request for each trapped agent.
    pub trapped: bool,
    /// Raise a gather request for each delivered token sighting.
    pub token_sighting: bool,
    /// Raise a lead request while no one is leading.
    pub lead: bool,
}

impl Default for Triggers {
    fn default() -> Self {
        Self {
            trapped: true,
            token_sighting: true,
            lead: true,
        }
    }
}

/// Ticks a performer has to meet each kind of need; `None` means open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Deadlines {
    pub move_through_maze: Option<u64>,
    pub help_team_mates: Option<u64>,
    pub gather_tokens: Option<u64>,
    pub communicate: Option<u64>,
}

impl Default for Deadlines {
    fn default() -> Self {
        Self {
            move_through_maze: None,
            help_team_mates: Some(30),
            gather_tokens: Some(30),
            communicate: Some(10),
        }
    }
}

impl Deadlines {
    pub fn for_function(&self, f: PurposeFunction) -> Option<u64> {
        match f {
            PurposeFunction::MoveThroughMaze => self.move_through_maze,
            PurposeFunction::HelpTeamMates => self.help_team_mates,
            PurposeFunction::GatherTokens => self.gather_tokens,
            PurposeFunction::Communicate => self.communicate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AllocationConfig {
    /// Lowest mean rung a candidate may sit on.
    pub min_rung: u8,
    /// Rung each affected agent must hold for the performer to accept.
    pub accept_rung: u8,
    /// Ticks before the same need may be raised again.
    pub cooldown: u64,
    /// Limit the affected set to teammates this close to the origin;
    /// absent means every teammate still in the maze.
    pub affected_radius: Option<usize>,
    pub triggers: Triggers,
    pub deadlines: Deadlines,
}

impl Default for AllocationConfig {
    fn default() -> Self {
        Self {
            min_rung: 2,
            accept_rung: 2,
            cooldown: 5,
            affected_radius: None,
            triggers: Triggers::default(),
            deadlines: Deadlines::default(),
        }
    }
}

/// 0 when the agent is trapped, gone, already performing, or cut off from
/// the origin; otherwise decays with path distance as 1/(1+d).
pub fn availability(agent: &AgentState, request: &FunctionRequest, maze: &Maze, contracts: &[Contract]) -> f64 {
    if agent.is_trapped() || agent.is_escaped() {
        return 0.0;
    }
    if contracts.iter().any(|c| c.is_active() && c.performer == agent.id) {
        return 0.0;
    }
    match maze.distance(agent.pos, request.origin) {
        Some(d) => 1.0 / (1.0 + d as f64),
        None => 0.0,
    }
}

pub fn suitability(
    agent: &AgentState,
    request: &FunctionRequest,
    maze: &Maze,
    contracts: &[Contract],
    trust: &TrustModel,
) -> Suitability {
    let capability_norm = trust.capability.norm(agent.role, request.function);
    let availability = availability(agent, request, maze, contracts);
    Suitability {
        capability_norm,
        availability,
        product: capability_norm * availability,
    }
}

/// Orders the team for `request`, best first.
///
/// Candidates with zero capability or availability, a hard violation from
/// any observer, or a mean rung below `min_rung` are excluded. The rest are
/// sorted by suitability times mean composite trust, ties to the lower id.
pub fn rank_candidates(
    request: &FunctionRequest,
    agents: &[AgentState],
    maze: &Maze,
    contracts: &[Contract],
    trust: &TrustModel,
    min_rung: u8,
) -> Result<Ranking, AllocationError> {
    let mut ordered = Vec::new();
    let mut excluded = Vec::new();
    let mut blind: Option<(AgentId, f64)> = None;
    for a in agents {
        let s = suitability(a, request, maze, contracts, trust);
        let reason = if s.capability_norm == 0.0 {
            Some(ExclusionReason::Incapable)
        } else if s.product == 0.0 {
            Some(ExclusionReason::Unavailable)
        } else {
            None
        };
        if let Some(reason) = reason {
            excluded.push(Exclusion { agent: a.id, reason });
            continue;
        }
        if blind.is_none_or(|(_, best)| s.product > best) {
            blind = Some((a.id, s.product));
        }
        let mean_rung = trust.mean_rung(a.id, request.function);
        if trust.hard_flagged(a.id) {
            excluded.push(Exclusion {
                agent: a.id,
                reason: ExclusionReason::HardViolation,
            });
            continue;
        }
        if mean_rung < f64::from(min_rung) {
            excluded.push(Exclusion {
                agent: a.id,
                reason: ExclusionReason::BelowMinRung,
            });
            continue;
        }
        let t = trust.mean_composite(a.id, request.function);
        ordered.push(Candidate {
            agent: a.id,
            suitability: s,
            trust: t,
            mean_rung,
            score: s.product * t,
        });
    }
    if ordered.is_empty() {
        return Err(AllocationError::NoCapableCandidate {
            function: request.function,
            exclusions: excluded,
        });
    }
    ordered.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.agent.cmp(&b.agent)));
    Ok(Ranking {
        ordered,
        excluded,
        trust_blind_best: blind.map(|(id, _)| id),
    })
}

/// Drafts a contract. Affected parties are the teammates still in the maze
/// (optionally only those near the origin); supporters are those with a
/// supporter score for the function.
pub fn propose_contract(
    id: ContractId,
    request: FunctionRequest,
    performer: AgentId,
    agents: &[AgentState],
    trust: &TrustModel,
    config: &AllocationConfig,
) -> Contract {
    let others = || agents.iter().filter(move |a| a.id != performer && !a.is_escaped());
    let affected = others()
        .filter(|a| {
            config
                .affected_radius
                .is_none_or(|r| a.pos.manhattan(request.origin) <= r)
        })
        .map(|a| a.id)
        .collect();
    let supporters = others()
        .filter(|a| trust.capability.score(a.role, request.function, Side::Supporter) > 0)
        .map(|a| a.id)
        .collect();
    Contract {
        id,
        request,
        performer,
        supporters,
        affected,
        status: ContractStatus::Proposed,
        decided_at: None,
        deadline: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Negotiation {
    Accepted,
    Rejected { dissenters: Vec<AgentId> },
}

/// Each affected agent accepts when its own rung for the performer on this
/// function is at least `accept_rung`; acceptance must be unanimous.
pub fn negotiate(
    contract: &mut Contract,
    trust: &TrustModel,
    accept_rung: u8,
    tick: u64,
) -> Result<Negotiation, AllocationError> {
    if contract.status != ContractStatus::Proposed {
        return Err(AllocationError::InvalidState {
            contract: contract.id,
            status: contract.status,
        });
    }
    let dissenters: Vec<AgentId> = contract
        .affected
        .iter()
        .copied()
        .filter(|o| trust.record(*o, contract.performer, contract.function()).rung < accept_rung)
        .collect();
    contract.decided_at = Some(tick);
    if dissenters.is_empty() {
        contract.status = ContractStatus::Accepted;
        Ok(Negotiation::Accepted)
    } else {
        contract.status = ContractStatus::Rejected;
        Ok(Negotiation::Rejected { dissenters })
    }
}

/// Closes an accepted contract and lets every other agent update its
/// predictability estimate for the performer.
pub fn settle_contract(
    contract: &mut Contract,
    success: bool,
    trust: &mut TrustModel,
) -> Result<Vec<TrustChange>, AllocationError> {
    if contract.status != ContractStatus::Accepted {
        return Err(AllocationError::InvalidState {
            contract: contract.id,
            status: contract.status,
        });
    }
    contract.status = if success {
        ContractStatus::Completed
    } else {
        ContractStatus::Failed
    };
    Ok(trust.observe_outcome(contract.performer, contract.function(), success))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Role;
    use crate::mission::Hardness;
    use crate::trust::{CapabilityMatrix, Counts, TrustConfig};
    use crate::world::{load_maze, Hand, Heading};

    fn corridor() -> Maze {
        load_maze("############\n#S........E#\n############").unwrap()
    }

    fn team(xs: [usize; 4]) -> Vec<AgentState> {
        Role::ALL
            .into_iter()
            .zip(xs)
            .enumerate()
            .map(|(i, (r, x))| AgentState::new(i, r, Position::new(x, 1), Heading::East, Hand::Left))
            .collect()
    }

    fn model() -> TrustModel {
        TrustModel::new(TrustConfig::default(), CapabilityMatrix::default(), Role::ALL.to_vec())
    }

    fn help_request(origin: Position) -> FunctionRequest {
        FunctionRequest::new(Need::Release { agent: 0 }, origin, 1, Requester::System)
    }

    #[test]
    fn availability_rules() {
        let maze = corridor();
        let mut agents = team([1, 2, 3, 5]);
        let req = help_request(Position::new(5, 1));
        assert_eq!(availability(&agents[3], &req, &maze, &[]), 1.0);
        assert!((availability(&agents[0], &req, &maze, &[]) - 0.2).abs() < 1e-12);
        agents[0].status = crate::agents::Status::Trapped;
        assert_eq!(availability(&agents[0], &req, &maze, &[]), 0.0);
    }

    #[test]
    fn help_prefers_neutral_then_collector() {
        let maze = corridor();
        let agents = team([1, 2, 3, 4]);
        let req = help_request(Position::new(3, 1));
        let trust = model();
        let r = rank_candidates(&req, &agents, &maze, &[], &trust, 2).unwrap();
        let ids: Vec<_> = r.ordered.iter().map(|c| c.agent).collect();
        assert_eq!(ids, vec![3, 1]);
        let incapable: Vec<_> = r
            .excluded
            .iter()
            .filter(|e| e.reason == ExclusionReason::Incapable)
            .map(|e| e.agent)
            .collect();
        assert_eq!(incapable, vec![0, 2]);
        assert_eq!(r.trust_blind_best, Some(3));
    }

    #[test]
    fn distrusted_neutral_gives_way_to_collector() {
        let maze = corridor();
        let agents = team([1, 2, 3, 4]);
        let req = help_request(Position::new(3, 1));
        let mut trust = model();
        for o in 0..3 {
            trust.predictability.set_counts(
                o,
                3,
                PurposeFunction::HelpTeamMates,
                Counts {
                    successes: 0,
                    trials: 20,
                },
            );
            trust.integrity.apply(o, 3, Hardness::Soft, 0.1);
        }
        let r = rank_candidates(&req, &agents, &maze, &[], &trust, 2).unwrap();
        assert_eq!(r.ordered[0].agent, 1);
        assert_eq!(r.trust_blind_best, Some(3));
    }

    #[test]
    fn hard_violated_collector_cannot_gather() {
        let maze = corridor();
        let agents = team([1, 2, 3, 4]);
        let req = FunctionRequest::new(Need::Token { pos: Position::new(6, 1) }, Position::new(6, 1), 1, Requester::System);
        let mut trust = model();
        assert_eq!(rank_candidates(&req, &agents, &maze, &[], &trust, 2).unwrap().ordered[0].agent, 1);
        trust.apply_violation(1, Hardness::Hard);
        assert!(matches!(
            rank_candidates(&req, &agents, &maze, &[], &trust, 2),
            Err(AllocationError::NoCapableCandidate { .. })
        ));
    }

    #[test]
    fn supporters_follow_the_supporter_scores() {
        let agents = team([1, 2, 3, 4]);
        let trust = model();
        let cfg = AllocationConfig::default();
        let gather = FunctionRequest::new(Need::Token { pos: Position::new(6, 1) }, Position::new(6, 1), 1, Requester::System);
        let c = propose_contract(0, gather, 1, &agents, &trust, &cfg);
        assert!(c.supporters.is_empty());
        assert_eq!(c.affected, vec![0, 2, 3]);
        let c = propose_contract(1, help_request(Position::new(3, 1)), 3, &agents, &trust, &cfg);
        assert_eq!(c.supporters, vec![1]);
        let c = propose_contract(2, help_request(Position::new(3, 1)), 0, &agents, &trust, &cfg);
        assert_eq!(c.supporters, vec![1, 3]);
    }

    #[test]
    fn negotiation_rules() {
        let agents = vec![AgentState::new(0, Role::Leader, Position::new(1, 1), Heading::East, Hand::Left)];
        let solo = TrustModel::new(TrustConfig::default(), CapabilityMatrix::default(), vec![Role::Leader]);
        let req = FunctionRequest::new(Need::Lead, Position::new(1, 1), 1, Requester::System);
        let mut c = propose_contract(0, req, 0, &agents, &solo, &AllocationConfig::default());
        assert!(c.affected.is_empty());
        assert_eq!(negotiate(&mut c, &solo, 2, 1), Ok(Negotiation::Accepted));
        assert!(matches!(
            negotiate(&mut c, &solo, 2, 1),
            Err(AllocationError::InvalidState { .. })
        ));
    }

    #[test]
    fn settle_updates_every_observer() {
        let agents = team([1, 2, 3, 4]);
        let mut trust = model();
        let req = FunctionRequest::new(Need::Token { pos: Position::new(6, 1) }, Position::new(6, 1), 1, Requester::System);
        let mut c = propose_contract(0, req, 1, &agents, &trust, &AllocationConfig::default());
        negotiate(&mut c, &trust, 2, 1).unwrap();
        let changes = settle_contract(&mut c, true, &mut trust).unwrap();
        assert_eq!(changes.len(), 3);
        assert!(changes.iter().all(|ch| ch.counts == Counts { successes: 1, trials: 1 }));
        assert_eq!(c.status, ContractStatus::Completed);
        assert!(settle_contract(&mut c, true, &mut trust).is_err());
    }
}

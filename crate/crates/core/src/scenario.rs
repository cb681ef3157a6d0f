//! Scenario files: parsing, defaults and validation.
//!
//! A scenario is a TOML document with the sections `maze`, `agents`, `cpt`,
//! `mission`, `trust`, `allocation`, `engine` and `script`. Unknown keys are
//! rejected. Validation collects every problem it finds, each tagged with
//! the section and key it concerns.

use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{ActionCpt, AgentId, InterpretationTable, Role};
use crate::allocation::AllocationConfig;
use crate::mission::{
    build_default_mission, AbstractionHierarchy, AllocationMap, GoalSpec, Level, Node, PurposeFunction,
    ValuePriorityMeasure, FUNCTIONAL_PURPOSE,
};
use crate::trust::{CapabilityMatrix, Side, TrustConfig, TrustLadder, TrustWeights};
use crate::world::{generate_maze, load_maze, Hand, Heading, Maze, MazeParams, Position};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_SCENARIO: &str = include_str!("../scenarios/default.toml");
pub const COLLECTOR_FAILS: &str = include_str!("../scenarios/collector-fails.toml");
pub const INTEGRITY_BREACH: &str = include_str!("../scenarios/integrity-breach.toml");

/// Scenarios shipped with the crate, by name.
pub const BUILTIN: [(&str, &str); 3] = [
    ("default", DEFAULT_SCENARIO),
    ("collector-fails", COLLECTOR_FAILS),
    ("integrity-breach", INTEGRITY_BREACH),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub section: String,
    pub key: String,
    pub reason: String,
}

impl Diagnostic {
    fn new(section: &str, key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            section: section.to_string(),
            key: key.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.section, self.key, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid scenario:\n{}", list(.0))]
    Invalid(Vec<Diagnostic>),
}

fn list(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

impl ScenarioError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            ScenarioError::Invalid(d) => d,
            ScenarioError::Io { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub maze: MazeSection,
    pub agents: Vec<AgentSection>,
    #[serde(default)]
    pub cpt: CptSection,
    #[serde(default)]
    pub mission: MissionSection,
    #[serde(default)]
    pub trust: TrustSection,
    #[serde(default)]
    pub allocation: AllocationConfig,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub script: Script,
}

/// Exactly one of `text`, `file` or `generate`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MazeSection {
    pub text: Option<String>,
    /// Relative to the scenario file.
    pub file: Option<PathBuf>,
    pub generate: Option<GenerateSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    #[serde(default = "d_side")]
    pub width: usize,
    #[serde(default = "d_side")]
    pub height: usize,
    #[serde(default = "d_tokens")]
    pub tokens: usize,
    #[serde(default = "d_gates")]
    pub gates: usize,
    /// Defaults to the run seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn d_side() -> usize {
    MazeParams::default().width
}
fn d_tokens() -> usize {
    MazeParams::default().tokens
}
fn d_gates() -> usize {
    MazeParams::default().gates
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    pub role: Role,
    #[serde(default = "d_hand")]
    pub hand: Hand,
    /// Defaults to the maze's first start cell.
    #[serde(default)]
    pub start: Option<Position>,
    #[serde(default = "d_heading")]
    pub heading: Heading,
    /// Probability of pursuing each value and priority measure.
    #[serde(default)]
    pub goal_weights: IndexMap<String, f64>,
}

fn d_hand() -> Hand {
    Hand::Left
}
fn d_heading() -> Heading {
    Heading::North
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CptSection {
    pub leader: Option<ActionCpt>,
    pub collector: Option<ActionCpt>,
    pub gate_user: Option<ActionCpt>,
    pub neutral: Option<ActionCpt>,
}

impl CptSection {
    pub fn get(&self, role: Role) -> Option<&ActionCpt> {
        match role {
            Role::Leader => self.leader.as_ref(),
            Role::Collector => self.collector.as_ref(),
            Role::GateUser => self.gate_user.as_ref(),
            Role::Neutral => self.neutral.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionSection {
    /// Merged into the default measures by name.
    pub vpms: Vec<ValuePriorityMeasure>,
    /// Replaces the default hierarchy entirely.
    pub hierarchy: Option<AbstractionHierarchy>,
    /// Purpose functions allocated to each role before the mission.
    pub soca: Option<SocaSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SocaSection {
    pub leader: Vec<PurposeFunction>,
    pub collector: Vec<PurposeFunction>,
    pub gate_user: Vec<PurposeFunction>,
    pub neutral: Vec<PurposeFunction>,
}

impl SocaSection {
    fn get(&self, role: Role) -> &[PurposeFunction] {
        match role {
            Role::Leader => &self.leader,
            Role::Collector => &self.collector,
            Role::GateUser => &self.gate_user,
            Role::Neutral => &self.neutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrustSection {
    pub weights: TrustWeights,
    pub ladder: Vec<f64>,
    pub soft_penalty: f64,
    pub recovery: f64,
    pub initial: Vec<InitialTrust>,
    pub capability: Vec<CapabilityOverride>,
}

impl Default for TrustSection {
    fn default() -> Self {
        let c = TrustConfig::default();
        Self {
            weights: c.weights,
            ladder: c.ladder.thresholds,
            soft_penalty: c.soft_penalty,
            recovery: c.recovery,
            initial: Vec::new(),
            capability: Vec::new(),
        }
    }
}

/// Starting trust of one observer in one target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialTrust {
    pub observer: AgentId,
    pub target: AgentId,
    /// All functions when absent.
    #[serde(default)]
    pub function: Option<PurposeFunction>,
    #[serde(default)]
    pub successes: u32,
    #[serde(default)]
    pub trials: u32,
    #[serde(default)]
    pub integrity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapabilityOverride {
    pub role: Role,
    pub function: PurposeFunction,
    #[serde(default)]
    pub performer: Option<u8>,
    #[serde(default)]
    pub supporter: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    /// Defaults to ten times the number of open cells.
    pub max_ticks: Option<u64>,
    pub time_bucket_ticks: u64,
    pub visibility_radius: usize,
    pub plot_stride: u64,
}

impl Default for EngineSection {
    fn default() -> Self {
        Self {
            max_ticks: None,
            time_bucket_ticks: 50,
            visibility_radius: 3,
            plot_stride: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Script {
    pub requests: Vec<ScriptedRequest>,
    pub faults: Vec<Fault>,
}

/// A request raised by the scenario at a fixed tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedRequest {
    pub tick: u64,
    pub function: PurposeFunction,
    pub origin: Position,
}

/// The agent stops for the whole of the listed contracts (1-based count of
/// contracts it accepted for `function`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    pub agent: AgentId,
    pub function: PurposeFunction,
    pub attempts: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub max_ticks: u64,
    pub time_bucket_ticks: u64,
    pub visibility_radius: usize,
    pub plot_stride: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub role: Role,
    pub hand: Hand,
    pub start: Position,
    pub heading: Heading,
    pub goal_weights: IndexMap<String, f64>,
    pub cpt: ActionCpt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mission {
    pub hierarchy: AbstractionHierarchy,
    pub vpms: Vec<ValuePriorityMeasure>,
    pub goals: GoalSpec,
    pub soca: AllocationMap,
}

/// A validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub maze: Maze,
    pub agents: Vec<AgentSpec>,
    pub mission: Mission,
    pub interpretation: InterpretationTable,
    pub trust: TrustConfig,
    pub capability: CapabilityMatrix,
    pub initial_trust: Vec<InitialTrust>,
    pub allocation: AllocationConfig,
    pub engine: EngineConfig,
    pub script: Script,
    file: ScenarioFile,
    base: Option<PathBuf>,
}

impl Scenario {
    pub fn from_toml_str(text: &str, base: Option<&Path>) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| format!("line {}", text[..s.start].matches('\n').count() + 1))
                .unwrap_or_default();
            ScenarioError::Invalid(vec![Diagnostic::new("document", line, e.message())])
        })?;
        Self::from_file(file, base)
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path.parent())
    }

    /// Loads a file path, or a shipped scenario by name.
    pub fn load(spec: &str) -> Result<Self, ScenarioError> {
        match builtin(spec) {
            Some(text) if !Path::new(spec).exists() => Self::from_toml_str(text, None),
            _ => Self::from_path(Path::new(spec)),
        }
    }

    pub fn from_file(file: ScenarioFile, base: Option<&Path>) -> Result<Self, ScenarioError> {
        resolve(file, base.map(Path::to_path_buf))
    }

    /// Same scenario under another run seed. Mazes generated from the run
    /// seed are regenerated.
    pub fn with_seed(&self, seed: u64) -> Result<Self, ScenarioError> {
        let mut file = self.file.clone();
        file.seed = seed;
        resolve(file, self.base.clone())
    }

    pub fn with_max_ticks(mut self, max_ticks: u64) -> Self {
        self.engine.max_ticks = max_ticks;
        self.file.engine.max_ticks = Some(max_ticks);
        self
    }

    pub fn with_plot_stride(mut self, stride: u64) -> Self {
        self.engine.plot_stride = stride.max(1);
        self.file.engine.plot_stride = stride.max(1);
        self
    }

    pub fn file(&self) -> &ScenarioFile {
        &self.file
    }

    pub fn roles(&self) -> Vec<Role> {
        self.agents.iter().map(|a| a.role).collect()
    }
}

fn resolve(file: ScenarioFile, base: Option<PathBuf>) -> Result<Scenario, ScenarioError> {
    let mut diags = Vec::new();

    if file.schema_version != SCHEMA_VERSION {
        diags.push(Diagnostic::new(
            "document",
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
        ));
    }

    let maze = load_section_maze(&file.maze, file.seed, base.as_deref(), &mut diags);

    // mission
    let (default_h, mut vpms, goals) = build_default_mission();
    for v in &file.mission.vpms {
        match vpms.iter_mut().find(|d| d.name == v.name) {
            Some(d) => *d = v.clone(),
            None => vpms.push(v.clone()),
        }
    }
    let hierarchy = match &file.mission.hierarchy {
        Some(h) => h.clone(),
        None => {
            let mut h = default_h;
            for v in &vpms {
                if h.node(&v.name).is_none() {
                    h.nodes.push(Node {
                        id: v.name.clone(),
                        level: Level::ValuePriorityMeasure,
                        label: v.name.replace('_', " "),
                    });
                    h.edges.push((FUNCTIONAL_PURPOSE.to_string(), v.name.clone()));
                }
            }
            h
        }
    };
    if let Err(e) = hierarchy.validate() {
        diags.push(Diagnostic::new("mission", "hierarchy", e.to_string()));
    }
    for pf in PurposeFunction::ALL {
        if hierarchy.node(pf.id()).is_none() {
            diags.push(Diagnostic::new("mission", "hierarchy", format!("missing purpose function {}", pf.id())));
        }
    }
    let vpm_names: Vec<&str> = vpms.iter().map(|v| v.name.as_str()).collect();
    for (i, v) in vpms.iter().enumerate() {
        if let (Some(z), Some(m)) = (v.zone, &maze) {
            if z.x0 > z.x1 || z.y0 > z.y1 || z.x1 >= m.width() || z.y1 >= m.height() {
                diags.push(Diagnostic::new("mission", format!("vpms[{i}].zone"), "zone is empty or outside the maze"));
            }
        }
    }

    // trust
    let trust = TrustConfig {
        weights: file.trust.weights,
        ladder: TrustLadder {
            thresholds: file.trust.ladder.clone(),
        },
        soft_penalty: file.trust.soft_penalty,
        recovery: file.trust.recovery,
    };
    if let Err(e) = trust.weights.validate() {
        diags.push(Diagnostic::new("trust", "weights", e.to_string()));
    }
    if let Err(e) = trust.ladder.validate() {
        diags.push(Diagnostic::new("trust", "ladder", e.to_string()));
    }
    if let Err(e) = trust.validate() {
        if !matches!(
            e,
            crate::trust::TrustError::BadWeights(_) | crate::trust::TrustError::BadLadder(_)
        ) {
            diags.push(Diagnostic::new("trust", "soft_penalty/recovery", e.to_string()));
        }
    }
    let mut capability = CapabilityMatrix::default();
    for (i, o) in file.trust.capability.iter().enumerate() {
        for (side, score) in [(Side::Performer, o.performer), (Side::Supporter, o.supporter)] {
            if let Some(s) = score {
                if let Err(e) = capability.set(o.role, o.function, side, s) {
                    diags.push(Diagnostic::new("trust", format!("capability[{i}]"), e.to_string()));
                }
            }
        }
    }
    let n = file.agents.len();
    for (i, t) in file.trust.initial.iter().enumerate() {
        let key = format!("initial[{i}]");
        if t.observer >= n || t.target >= n || t.observer == t.target {
            diags.push(Diagnostic::new("trust", &key, "observer and target must be distinct roster indices"));
        }
        if t.successes > t.trials {
            diags.push(Diagnostic::new("trust", &key, "successes exceed trials"));
        }
        if t.integrity.is_some_and(|x| !(0.0..=1.0).contains(&x)) {
            diags.push(Diagnostic::new("trust", &key, "integrity must lie in [0, 1]"));
        }
    }

    // agents and their tables
    if file.agents.is_empty() {
        diags.push(Diagnostic::new("agents", "agents", "at least one agent is required"));
    }
    let mut agents = Vec::new();
    for (i, a) in file.agents.iter().enumerate() {
        let key = |k: &str| format!("agents[{i}].{k}");
        let start = match (&maze, a.start) {
            (Some(m), Some(p)) => {
                if !m.in_bounds(p) || !m.is_open(p) {
                    diags.push(Diagnostic::new("agents", key("start"), format!("{p} is not an open cell")));
                }
                p
            }
            (Some(m), None) => m.starts()[0],
            (None, p) => p.unwrap_or(Position::new(0, 0)),
        };
        if !a.goal_weights.is_empty() {
            let total: f64 = a.goal_weights.values().sum();
            if a.goal_weights.values().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-9 {
                diags.push(Diagnostic::new(
                    "agents",
                    key("goal_weights"),
                    format!("weights must lie in [0, 1] and sum to 1, got {total}"),
                ));
            }
            for g in a.goal_weights.keys() {
                if !vpm_names.contains(&g.as_str()) {
                    diags.push(Diagnostic::new("agents", key("goal_weights"), format!("unknown measure {g:?}")));
                }
            }
        }
        let cpt = match file.cpt.get(a.role) {
            Some(c) => c.clone(),
            None => {
                diags.push(Diagnostic::new("cpt", a.role.id(), "no table for a role on the roster"));
                ActionCpt::default()
            }
        };
        agents.push(AgentSpec {
            role: a.role,
            hand: a.hand,
            start,
            heading: a.heading,
            goal_weights: a.goal_weights.clone(),
            cpt,
        });
    }
    for role in Role::ALL {
        let Some(cpt) = file.cpt.get(role) else { continue };
        if cpt.rows.is_empty() {
            diags.push(Diagnostic::new("cpt", role.id(), "table has no rows"));
        }
        for (r, row) in cpt.rows.iter().enumerate() {
            let key = format!("{}[{r}]", role.id());
            if let Err(reason) = row.then.check() {
                diags.push(Diagnostic::new("cpt", &key, reason));
            }
            if let Some(g) = &row.when.goal {
                if !vpm_names.contains(&g.as_str()) {
                    diags.push(Diagnostic::new("cpt", &key, format!("unknown goal {g:?}")));
                }
            }
            if row.when.time_bucket == Some(0) {
                diags.push(Diagnostic::new("cpt", &key, "time buckets start at 1"));
            }
        }
    }

    // allocation
    let top = trust.ladder.thresholds.len() as u8;
    if file.allocation.min_rung > top {
        diags.push(Diagnostic::new("allocation", "min_rung", format!("exceeds the top rung {top}")));
    }
    if file.allocation.accept_rung > top {
        diags.push(Diagnostic::new("allocation", "accept_rung", format!("exceeds the top rung {top}")));
    }

    // engine
    let e = file.engine;
    if e.time_bucket_ticks == 0 {
        diags.push(Diagnostic::new("engine", "time_bucket_ticks", "must be at least 1"));
    }
    if e.plot_stride == 0 {
        diags.push(Diagnostic::new("engine", "plot_stride", "must be at least 1"));
    }

    // script
    for (i, r) in file.script.requests.iter().enumerate() {
        if r.tick == 0 {
            diags.push(Diagnostic::new("script", format!("requests[{i}].tick"), "ticks start at 1"));
        }
        if let Some(m) = &maze {
            if !m.in_bounds(r.origin) {
                diags.push(Diagnostic::new("script", format!("requests[{i}].origin"), "outside the maze"));
            }
        }
    }
    for (i, f) in file.script.faults.iter().enumerate() {
        if f.agent >= n {
            diags.push(Diagnostic::new("script", format!("faults[{i}].agent"), "not a roster index"));
        }
        if f.attempts.contains(&0) {
            diags.push(Diagnostic::new("script", format!("faults[{i}].attempts"), "attempts count from 1"));
        }
    }

    let soca = match &file.mission.soca {
        Some(s) => AllocationMap::derive(&hierarchy, |r, f| s.get(r).contains(&f)),
        None => AllocationMap::derive(&hierarchy, |r, f| capability.performer(r, f) > 0),
    };

    let Some(maze) = maze else {
        return Err(ScenarioError::Invalid(diags));
    };
    if !diags.is_empty() {
        return Err(ScenarioError::Invalid(diags));
    }
    let engine = EngineConfig {
        max_ticks: e.max_ticks.unwrap_or(10 * maze.open_cells() as u64),
        time_bucket_ticks: e.time_bucket_ticks,
        visibility_radius: e.visibility_radius,
        plot_stride: e.plot_stride,
    };
    Ok(Scenario {
        name: file.name.clone().unwrap_or_else(|| "scenario".to_string()),
        seed: file.seed,
        maze,
        agents,
        mission: Mission {
            hierarchy,
            vpms,
            goals,
            soca,
        },
        interpretation: InterpretationTable::default(),
        initial_trust: file.trust.initial.clone(),
        trust,
        capability,
        allocation: file.allocation,
        engine,
        script: file.script.clone(),
        file,
        base,
    })
}

fn load_section_maze(section: &MazeSection, seed: u64, base: Option<&Path>, diags: &mut Vec<Diagnostic>) -> Option<Maze> {
    let given = [section.text.is_some(), section.file.is_some(), section.generate.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if given != 1 {
        diags.push(Diagnostic::new("maze", "text/file/generate", "exactly one maze source is required"));
        return None;
    }
    let loaded = if let Some(text) = &section.text {
        load_maze(text.trim_matches('\n')).map_err(|e| ("text", e.to_string()))
    } else if let Some(path) = &section.file {
        let full = base.map_or_else(|| path.clone(), |b| b.join(path));
        match std::fs::read_to_string(&full) {
            Ok(text) => load_maze(text.trim_end_matches('\n')).map_err(|e| ("file", e.to_string())),
            Err(e) => Err(("file", format!("cannot read {}: {e}", full.display()))),
        }
    } else {
        let g = section.generate.expect("one source is present");
        let params = MazeParams {
            width: g.width,
            height: g.height,
            tokens: g.tokens,
            gates: g.gates,
        };
        generate_maze(params, g.seed.unwrap_or(seed)).map_err(|e| ("generate", e.to_string()))
    };
    match loaded {
        Ok(m) => Some(m),
        Err((key, reason)) => {
            diags.push(Diagnostic::new("maze", key, reason));
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
seed = 3
[maze]
text = """
#####
#S.E#
#####
"""
[[agents]]
role = "leader"
heading = "east"
[[cpt.leader]]
then = { forward = 1.0 }
"#;

    #[test]
    fn minimal_scenario_defaults() {
        let s = Scenario::from_toml_str(MINIMAL, None).unwrap();
        assert_eq!(s.agents[0].start, Position::new(1, 1));
        assert_eq!(s.engine.max_ticks, 10 * 3);
        assert_eq!(s.engine.visibility_radius, 3);
        assert_eq!(s.allocation.min_rung, 2);
        assert_eq!(s.mission.vpms.len(), 4);
    }

    #[test]
    fn shipped_scenarios_validate() {
        for (name, text) in BUILTIN {
            Scenario::from_toml_str(text, None).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn bad_row_is_named() {
        let text = MINIMAL.replace("forward = 1.0", "forward = 0.5, stop = 0.4");
        let err = Scenario::from_toml_str(&text, None).unwrap_err();
        let d = &err.diagnostics()[0];
        assert_eq!((d.section.as_str(), d.key.as_str()), ("cpt", "leader[0]"));
        assert!(d.reason.contains("0.9"));
    }

    #[test]
    fn maze_without_exit() {
        let text = MINIMAL.replace("#S.E#", "#S..#");
        let err = Scenario::from_toml_str(&text, None).unwrap_err();
        assert_eq!(err.diagnostics()[0].section, "maze");
        assert!(err.diagnostics()[0].reason.contains("no exit"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("seed = 3", "seed = 3\ncolour = \"red\"");
        let err = Scenario::from_toml_str(&text, None).unwrap_err();
        assert!(err.diagnostics()[0].reason.contains("colour"));
    }

    #[test]
    fn bad_weights_and_missing_table() {
        let text = MINIMAL.replace(
            "[[cpt.leader]]",
            "[[agents]]\nrole = \"neutral\"\n[trust]\nweights = { capability = 0.5, predictability = 0.5, integrity = 0.5 }\n[[cpt.leader]]",
        );
        let err = Scenario::from_toml_str(&text, None).unwrap_err();
        let keys: Vec<_> = err.diagnostics().iter().map(|d| (d.section.as_str(), d.key.as_str())).collect();
        assert!(keys.contains(&("trust", "weights")));
        assert!(keys.contains(&("cpt", "neutral")));
    }

    #[test]
    fn reseeding_regenerates_seeded_mazes() {
        let text = r#"
schema_version = 1
[maze.generate]
width = 11
height = 11
tokens = 0
gates = 0
[[agents]]
role = "leader"
[[cpt.leader]]
then = { forward = 1.0 }
"#;
        let s = Scenario::from_toml_str(text, None).unwrap();
        let other = s.with_seed(99).unwrap();
        assert_eq!(other.seed, 99);
        assert_ne!(s.maze, other.maze);
    }
}

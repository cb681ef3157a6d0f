//! Trust as capability, predictability and integrity, combined into a
//! composite score and placed on a ladder of rungs.
//!
//! Trust is held per observer: agent A's view of agent B for one purpose
//! function. Capability is static per role; predictability is learned from
//! contract outcomes; integrity erodes with violations of the mission's
//! values and priority measures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{AgentId, Role};
use crate::mission::{Hardness, PurposeFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrustError {
    #[error("weights must be non-negative and sum to 1, got {0:?}")]
    BadWeights([f64; 3]),
    #[error("ladder thresholds must be strictly ascending inside (0, 1), got {0:?}")]
    BadLadder(Vec<f64>),
    #[error("capability score {0} is outside 0..=3")]
    BadScore(u8),
    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoActiveColour {
    Green,
    Yellow,
    Orange,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Performer,
    Supporter,
}

/// Ordinal score of a colour rating; identical for both sides.
pub fn rating_score(colour: CoActiveColour, _side: Side) -> u8 {
    match colour {
        CoActiveColour::Green => 3,
        CoActiveColour::Yellow => 2,
        CoActiveColour::Orange => 1,
        CoActiveColour::Red => 0,
    }
}

/// Performer and supporter scores per role and purpose function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapabilityMatrix {
    performer: BTreeMap<(Role, PurposeFunction), u8>,
    supporter: BTreeMap<(Role, PurposeFunction), u8>,
}

impl CapabilityMatrix {
    pub fn zeros() -> Self {
        let all = || {
            Role::ALL
                .into_iter()
                .flat_map(|r| PurposeFunction::ALL.into_iter().map(move |f| ((r, f), 0)))
                .collect()
        };
        Self {
            performer: all(),
            supporter: all(),
        }
    }

    pub fn score(&self, role: Role, function: PurposeFunction, side: Side) -> u8 {
        let table = match side {
            Side::Performer => &self.performer,
            Side::Supporter => &self.supporter,
        };
        table.get(&(role, function)).copied().unwrap_or(0)
    }

    pub fn performer(&self, role: Role, function: PurposeFunction) -> u8 {
        self.score(role, function, Side::Performer)
    }

    pub fn supporter(&self, role: Role, function: PurposeFunction) -> u8 {
        self.score(role, function, Side::Supporter)
    }

    pub fn set(&mut self, role: Role, function: PurposeFunction, side: Side, score: u8) -> Result<(), TrustError> {
        if score > 3 {
            return Err(TrustError::BadScore(score));
        }
        let table = match side {
            Side::Performer => &mut self.performer,
            Side::Supporter => &mut self.supporter,
        };
        table.insert((role, function), score);
        Ok(())
    }

    pub fn set_colour(&mut self, role: Role, function: PurposeFunction, side: Side, colour: CoActiveColour) {
        // rating_score is always within 0..=3
        let _ = self.set(role, function, side, rating_score(colour, side));
    }

    /// Performer score scaled to `[0, 1]`.
    pub fn norm(&self, role: Role, function: PurposeFunction) -> f64 {
        f64::from(self.performer(role, function)) / 3.0
    }
}

impl Default for CapabilityMatrix {
    /// Role definitions of the maze task.
    fn default() -> Self {
        use PurposeFunction::*;
        use Role::*;
        let rows: [(PurposeFunction, [u8; 4], [u8; 4]); 4] = [
            (MoveThroughMaze, [3, 3, 3, 3], [0, 0, 0, 0]),
            (HelpTeamMates, [0, 1, 0, 3], [0, 1, 0, 3]),
            (GatherTokens, [0, 3, 0, 0], [0, 0, 0, 0]),
            (Communicate, [3, 2, 2, 3], [2, 2, 2, 2]),
        ];
        let mut m = Self::zeros();
        for (f, perf, supp) in rows {
            for (i, role) in [Leader, Collector, GateUser, Neutral].into_iter().enumerate() {
                m.performer.insert((role, f), perf[i]);
                m.supporter.insert((role, f), supp[i]);
            }
        }
        m
    }
}

/// Sum of a role's scores over all purpose functions.
pub fn capability_total(matrix: &CapabilityMatrix, role: Role, side: Side) -> u32 {
    PurposeFunction::ALL
        .into_iter()
        .map(|f| u32::from(matrix.score(role, f, side)))
        .sum()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub successes: u32,
    pub trials: u32,
}

impl Counts {
    /// Laplace-smoothed success probability.
    pub fn estimate(self) -> f64 {
        (f64::from(self.successes) + 1.0) / (f64::from(self.trials) + 2.0)
    }
}

/// Success counts per (observer, target, function).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictabilityEstimator {
    counts: BTreeMap<(AgentId, AgentId, PurposeFunction), Counts>,
}

impl PredictabilityEstimator {
    pub fn counts(&self, observer: AgentId, target: AgentId, function: PurposeFunction) -> Counts {
        self.counts
            .get(&(observer, target, function))
            .copied()
            .unwrap_or_default()
    }

    pub fn set_counts(&mut self, observer: AgentId, target: AgentId, function: PurposeFunction, counts: Counts) {
        debug_assert!(counts.successes <= counts.trials);
        self.counts.insert((observer, target, function), counts);
    }

    pub fn estimate(&self, observer: AgentId, target: AgentId, function: PurposeFunction) -> f64 {
        self.counts(observer, target, function).estimate()
    }

    /// Records one observed outcome and returns the new estimate.
    pub fn update(&mut self, observer: AgentId, target: AgentId, function: PurposeFunction, success: bool) -> f64 {
        let c = self.counts.entry((observer, target, function)).or_default();
        c.trials += 1;
        if success {
            c.successes += 1;
        }
        c.estimate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrityEntry {
    pub score: f64,
    pub hard_violation: bool,
}

impl Default for IntegrityEntry {
    fn default() -> Self {
        Self {
            score: 1.0,
            hard_violation: false,
        }
    }
}

/// Integrity score per (observer, target).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegrityLedger {
    entries: BTreeMap<(AgentId, AgentId), IntegrityEntry>,
}

impl IntegrityLedger {
    pub fn entry(&self, observer: AgentId, target: AgentId) -> IntegrityEntry {
        self.entries
            .get(&(observer, target))
            .copied()
            .unwrap_or_default()
    }

    pub fn set(&mut self, observer: AgentId, target: AgentId, entry: IntegrityEntry) {
        self.entries.insert((observer, target), entry);
    }

    /// Applies one violation: soft multiplies by `soft_penalty`, hard zeroes
    /// the score and latches the flag.
    pub fn apply(
        &mut self,
        observer: AgentId,
        target: AgentId,
        severity: Hardness,
        soft_penalty: f64,
    ) -> IntegrityEntry {
        let e = self.entries.entry((observer, target)).or_default();
        match severity {
            Hardness::Soft => e.score = (e.score * soft_penalty).clamp(0.0, 1.0),
            Hardness::Hard => {
                e.score = 0.0;
                e.hard_violation = true;
            }
        }
        if e.hard_violation {
            e.score = 0.0;
        }
        *e
    }

    /// Per-tick recovery; returns the pairs whose score changed.
    pub fn recover(&mut self, multiplier: f64) -> Vec<(AgentId, AgentId, IntegrityEntry)> {
        let mut changed = Vec::new();
        for (&(o, t), e) in self.entries.iter_mut() {
            if e.hard_violation || e.score >= 1.0 {
                continue;
            }
            let next = (e.score * multiplier).min(1.0);
            if next != e.score {
                e.score = next;
                changed.push((o, t, *e));
            }
        }
        changed
    }
}

/// Weights for capability, predictability and integrity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustWeights {
    pub capability: f64,
    pub predictability: f64,
    pub integrity: f64,
}

impl Default for TrustWeights {
    fn default() -> Self {
        Self {
            capability: 1.0 / 3.0,
            predictability: 1.0 / 3.0,
            integrity: 1.0 / 3.0,
        }
    }
}

impl TrustWeights {
    pub fn validate(&self) -> Result<(), TrustError> {
        let w = [self.capability, self.predictability, self.integrity];
        let sum: f64 = w.iter().sum();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(TrustError::BadWeights(w));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustLadder {
    pub thresholds: Vec<f64>,
}

impl Default for TrustLadder {
    fn default() -> Self {
        Self {
            thresholds: vec![0.2, 0.4, 0.6, 0.8],
        }
    }
}

impl TrustLadder {
    pub fn validate(&self) -> Result<(), TrustError> {
        let inside = self.thresholds.iter().all(|t| *t > 0.0 && *t < 1.0);
        let ascending = self.thresholds.windows(2).all(|w| w[0] < w[1]);
        if self.thresholds.is_empty() || !inside || !ascending {
            return Err(TrustError::BadLadder(self.thresholds.clone()));
        }
        Ok(())
    }

    pub fn top_rung(&self) -> u8 {
        self.thresholds.len() as u8
    }
}

/// Weighted mean of the three components.
pub fn composite_trust(
    capability: f64,
    predictability: f64,
    integrity: f64,
    weights: &TrustWeights,
) -> Result<f64, TrustError> {
    weights.validate()?;
    let c = weights.capability * capability
        + weights.predictability * predictability
        + weights.integrity * integrity;
    Ok(c.clamp(0.0, 1.0))
}

/// Number of thresholds at or below `score`.
pub fn ladder_rung(score: f64, ladder: &TrustLadder) -> u8 {
    ladder.thresholds.iter().filter(|t| **t <= score).count() as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustRecord {
    pub capability: f64,
    pub predictability: f64,
    pub integrity: f64,
    pub composite: f64,
    pub rung: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrustConfig {
    pub weights: TrustWeights,
    pub ladder: TrustLadder,
    pub soft_penalty: f64,
    /// Integrity multiplier applied each tick; 1.0 disables recovery.
    pub recovery: f64,
}

impl Default for TrustConfig {
    fn default() -> Self {
        Self {
            weights: TrustWeights::default(),
            ladder: TrustLadder::default(),
            soft_penalty: 0.8,
            recovery: 1.0,
        }
    }
}

impl TrustConfig {
    pub fn validate(&self) -> Result<(), TrustError> {
        self.weights.validate()?;
        self.ladder.validate()?;
        if !(0.0..=1.0).contains(&self.soft_penalty) {
            return Err(TrustError::OutOfRange {
                name: "soft_penalty",
                range: "[0, 1]",
                value: self.soft_penalty,
            });
        }
        if !(self.recovery >= 1.0 && self.recovery.is_finite()) {
            return Err(TrustError::OutOfRange {
                name: "recovery",
                range: "[1, inf)",
                value: self.recovery,
            });
        }
        Ok(())
    }
}

/// The full trust matrix of a team.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustModel {
    pub config: TrustConfig,
    pub capability: CapabilityMatrix,
    pub predictability: PredictabilityEstimator,
    pub integrity: IntegrityLedger,
    roles: Vec<Role>,
}

impl TrustModel {
    pub fn new(config: TrustConfig, capability: CapabilityMatrix, roles: Vec<Role>) -> Self {
        Self {
            config,
            capability,
            predictability: PredictabilityEstimator::default(),
            integrity: IntegrityLedger::default(),
            roles,
        }
    }

    pub fn team_size(&self) -> usize {
        self.roles.len()
    }

    pub fn role(&self, agent: AgentId) -> Role {
        self.roles[agent]
    }

    /// Everyone but `target`.
    pub fn observers_of(&self, target: AgentId) -> impl Iterator<Item = AgentId> {
        (0..self.roles.len()).filter(move |o| *o != target)
    }

    pub fn record(&self, observer: AgentId, target: AgentId, function: PurposeFunction) -> TrustRecord {
        let capability = self.capability.norm(self.roles[target], function);
        let predictability = self.predictability.estimate(observer, target, function);
        let integrity = self.integrity.entry(observer, target).score;
        let w = &self.config.weights;
        let composite = (w.capability * capability + w.predictability * predictability + w.integrity * integrity)
            .clamp(0.0, 1.0);
        TrustRecord {
            capability,
            predictability,
            integrity,
            composite,
            rung: ladder_rung(composite, &self.config.ladder),
        }
    }

    /// Mean composite over observers; 1.0 for a team of one.
    pub fn mean_composite(&self, target: AgentId, function: PurposeFunction) -> f64 {
        let values: Vec<f64> = self
            .observers_of(target)
            .map(|o| self.record(o, target, function).composite)
            .collect();
        if values.is_empty() {
            1.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        }
    }

    /// Mean rung over observers; the top rung for a team of one.
    pub fn mean_rung(&self, target: AgentId, function: PurposeFunction) -> f64 {
        let values: Vec<f64> = self
            .observers_of(target)
            .map(|o| f64::from(self.record(o, target, function).rung))
            .collect();
        if values.is_empty() {
            f64::from(self.config.ladder.top_rung())
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        }
    }

    /// Whether any observer holds a hard violation against `target`.
    pub fn hard_flagged(&self, target: AgentId) -> bool {
        self.observers_of(target)
            .any(|o| self.integrity.entry(o, target).hard_violation)
    }
}

/// Why a trust record changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrustCause {
    Settled,
    Violation,
    Recovery,
}

/// One observer's view of one target for one function, before and after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustChange {
    pub observer: AgentId,
    pub target: AgentId,
    pub function: PurposeFunction,
    pub cause: TrustCause,
    pub counts: Counts,
    pub hard_violation: bool,
    pub before: TrustRecord,
    pub after: TrustRecord,
}

impl TrustModel {
    fn change(
        &self,
        observer: AgentId,
        target: AgentId,
        function: PurposeFunction,
        cause: TrustCause,
        before: TrustRecord,
    ) -> TrustChange {
        TrustChange {
            observer,
            target,
            function,
            cause,
            counts: self.predictability.counts(observer, target, function),
            hard_violation: self.integrity.entry(observer, target).hard_violation,
            before,
            after: self.record(observer, target, function),
        }
    }

    /// Every other agent observes one contract outcome.
    pub fn observe_outcome(&mut self, target: AgentId, function: PurposeFunction, success: bool) -> Vec<TrustChange> {
        let observers: Vec<AgentId> = self.observers_of(target).collect();
        observers
            .into_iter()
            .map(|o| {
                let before = self.record(o, target, function);
                self.predictability.update(o, target, function, success);
                self.change(o, target, function, TrustCause::Settled, before)
            })
            .collect()
    }

    /// Every other agent records a violation; integrity is shared across
    /// functions, so one change is reported per function.
    pub fn apply_violation(&mut self, target: AgentId, severity: Hardness) -> Vec<TrustChange> {
        let observers: Vec<AgentId> = self.observers_of(target).collect();
        let mut out = Vec::new();
        for o in observers {
            let before: Vec<TrustRecord> = PurposeFunction::ALL
                .iter()
                .map(|f| self.record(o, target, *f))
                .collect();
            self.integrity.apply(o, target, severity, self.config.soft_penalty);
            for (f, b) in PurposeFunction::ALL.into_iter().zip(before) {
                out.push(self.change(o, target, f, TrustCause::Violation, b));
            }
        }
        out
    }

    /// Per-tick integrity recovery.
    pub fn recover(&mut self) -> Vec<TrustChange> {
        if self.config.recovery == 1.0 {
            return Vec::new();
        }
        let mut befores = BTreeMap::new();
        for o in 0..self.roles.len() {
            for t in self.observers_of(o) {
                for f in PurposeFunction::ALL {
                    befores.insert((o, t, f), self.record(o, t, f));
                }
            }
        }
        let changed = self.integrity.recover(self.config.recovery);
        let mut out = Vec::new();
        for (o, t, _) in changed {
            for f in PurposeFunction::ALL {
                out.push(self.change(o, t, f, TrustCause::Recovery, befores[&(o, t, f)]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_scores() {
        for side in [Side::Performer, Side::Supporter] {
            assert_eq!(rating_score(CoActiveColour::Green, side), 3);
            assert_eq!(rating_score(CoActiveColour::Yellow, side), 2);
            assert_eq!(rating_score(CoActiveColour::Orange, side), 1);
            assert_eq!(rating_score(CoActiveColour::Red, side), 0);
        }
    }

    #[test]
    fn role_totals() {
        let m = CapabilityMatrix::default();
        let perf: Vec<u32> = Role::ALL
            .iter()
            .map(|r| capability_total(&m, *r, Side::Performer))
            .collect();
        let supp: Vec<u32> = Role::ALL
            .iter()
            .map(|r| capability_total(&m, *r, Side::Supporter))
            .collect();
        assert_eq!(perf, vec![6, 9, 5, 9]);
        assert_eq!(supp, vec![2, 3, 2, 5]);
        assert_eq!(capability_total(&CapabilityMatrix::zeros(), Role::Leader, Side::Performer), 0);
    }

    #[test]
    fn set_rejects_scores_above_three() {
        let mut m = CapabilityMatrix::zeros();
        assert_eq!(
            m.set(Role::Leader, PurposeFunction::Communicate, Side::Performer, 4),
            Err(TrustError::BadScore(4))
        );
        m.set_colour(Role::Leader, PurposeFunction::Communicate, Side::Performer, CoActiveColour::Yellow);
        assert_eq!(m.performer(Role::Leader, PurposeFunction::Communicate), 2);
    }

    #[test]
    fn laplace_estimates() {
        let mut est = PredictabilityEstimator::default();
        let f = PurposeFunction::GatherTokens;
        assert_eq!(est.estimate(0, 1, f), 0.5);
        for s in [true, true, true, false] {
            est.update(0, 1, f, s);
        }
        assert!((est.estimate(0, 1, f) - 4.0 / 6.0).abs() < 1e-12);
        for _ in 0..8 {
            est.update(2, 1, f, false);
        }
        assert!((est.estimate(2, 1, f) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn integrity_penalties() {
        let mut ledger = IntegrityLedger::default();
        assert_eq!(ledger.entry(0, 1), IntegrityEntry::default());
        let e = ledger.apply(0, 1, Hardness::Soft, 0.8);
        assert!((e.score - 0.8).abs() < 1e-12);
        let e = ledger.apply(0, 1, Hardness::Hard, 0.8);
        assert_eq!((e.score, e.hard_violation), (0.0, true));
        assert!(ledger.recover(1.5).is_empty());
        let e = ledger.apply(2, 1, Hardness::Soft, 0.5);
        assert_eq!(e.score, 0.5);
        let changed = ledger.recover(3.0);
        assert_eq!(changed.len(), 1);
        assert_eq!(ledger.entry(2, 1).score, 1.0);
    }

    #[test]
    fn composite_examples() {
        let w = TrustWeights::default();
        assert!((composite_trust(1.0, 1.0, 1.0, &w).unwrap() - 1.0).abs() < 1e-12);
        assert!((composite_trust(0.9, 0.5, 1.0, &w).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(composite_trust(0.0, 0.0, 0.0, &w).unwrap(), 0.0);
        let bad = TrustWeights {
            capability: 0.5,
            predictability: 0.5,
            integrity: 0.5,
        };
        assert!(matches!(composite_trust(1.0, 1.0, 1.0, &bad), Err(TrustError::BadWeights(_))));
    }

    #[test]
    fn rung_boundaries() {
        let l = TrustLadder::default();
        assert_eq!(ladder_rung(0.0, &l), 0);
        assert_eq!(ladder_rung(1.0, &l), 4);
        assert_eq!(ladder_rung(0.8, &l), 4);
        assert_eq!(ladder_rung(0.7999, &l), 3);
        assert!(TrustLadder { thresholds: vec![0.5, 0.4] }.validate().is_err());
        assert!(TrustLadder { thresholds: vec![0.0, 0.4] }.validate().is_err());
    }

    #[test]
    fn hard_violation_caps_composite() {
        let mut model = TrustModel::new(TrustConfig::default(), CapabilityMatrix::default(), Role::ALL.to_vec());
        let f = PurposeFunction::GatherTokens;
        model.integrity.apply(0, 1, Hardness::Hard, 0.8);
        let r = model.record(0, 1, f);
        let w = model.config.weights;
        assert!(r.composite <= w.capability * r.capability + w.predictability * r.predictability + 1e-12);
        assert!(model.hard_flagged(1));
        assert!(!model.hard_flagged(0));
    }

    #[test]
    fn solo_team_has_full_trust() {
        let model = TrustModel::new(TrustConfig::default(), CapabilityMatrix::default(), vec![Role::Leader]);
        assert_eq!(model.mean_composite(0, PurposeFunction::MoveThroughMaze), 1.0);
        assert_eq!(model.mean_rung(0, PurposeFunction::MoveThroughMaze), 4.0);
    }
}

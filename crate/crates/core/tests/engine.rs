use std::collections::BTreeMap;

use trustmaze::engine::{first_divergence, trust_from_trace};
use trustmaze::event::{from_jsonl, to_jsonl};
use trustmaze::scenario::{BUILTIN, COLLECTOR_FAILS, DEFAULT_SCENARIO, INTEGRITY_BREACH};
use trustmaze::{run, EventKind, Metrics, ReplayReport, Scenario};

fn load(text: &str) -> Scenario {
    Scenario::from_toml_str(text, None).expect("shipped scenario validates")
}

#[test]
fn help_is_proposed_within_two_ticks_of_a_trap() {
    for text in [DEFAULT_SCENARIO, COLLECTOR_FAILS, INTEGRITY_BREACH] {
        let s = load(text);
        let r = run(&s).unwrap();
        let traps: Vec<(u64, usize)> = r
            .trace
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::Trapped { agent, .. } => Some((e.tick, agent)),
                _ => None,
            })
            .collect();
        assert!(!traps.is_empty() || text == DEFAULT_SCENARIO, "{} has no trap", s.name);
        for (tick, agent) in traps {
            let proposed = r.trace.iter().any(|e| {
                e.tick > tick
                    && e.tick <= tick + 2
                    && matches!(e.kind, EventKind::ContractProposed { need: trustmaze::allocation::Need::Release { agent: a }, .. } if a == agent)
            });
            assert!(proposed, "{}: no help proposal for agent {agent} trapped at {tick}", s.name);
        }
    }
}

#[test]
fn solo_leader_escapes_perfect_maze() {
    let text = r#"
schema_version = 1
seed = 11
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
    let s = load(text);
    let bound = 4 * s.maze.open_cells() as u64;
    let r = run(&s.with_max_ticks(bound)).unwrap();
    assert!(r.metrics.ticks_to_all_escape.is_some_and(|t| t < bound));
}

#[test]
fn metrics_recompute_from_serialised_trace() {
    for (_, text) in BUILTIN {
        let s = load(text);
        let r = run(&s).unwrap();
        let parsed = from_jsonl(&to_jsonl(&r.trace)).unwrap();
        assert_eq!(parsed, r.trace);
        assert_eq!(Metrics::from_trace(&parsed, s.agents.len()), r.metrics);
    }
}

#[test]
fn every_settlement_and_violation_updates_trust() {
    for (_, text) in BUILTIN {
        let s = load(text);
        let r = run(&s).unwrap();
        let team = s.agents.len();
        for (i, e) in r.trace.iter().enumerate() {
            let (target, expected) = match e.kind {
                EventKind::ContractSettled { performer, .. } => (performer, team - 1),
                EventKind::Violation { agent, .. } => (agent, (team - 1) * 4),
                _ => continue,
            };
            let updates = r.trace[i + 1..]
                .iter()
                .take_while(|n| matches!(n.kind, EventKind::TrustUpdated { .. }))
                .filter(|n| matches!(n.kind, EventKind::TrustUpdated { target: t, .. } if t == target))
                .count();
            assert_eq!(updates, expected, "{} seq {}", s.name, e.seq);
        }
        let initial: Vec<_> = r.trajectories.iter().filter(|t| t.tick == 0).cloned().collect();
        let rebuilt = trust_from_trace(&initial, &r.trace);
        for f in &r.final_trust {
            let b = &rebuilt[&(f.observer, f.target, f.function)];
            assert_eq!((b.successes, b.trials, b.rung, b.hard_violation), (f.successes, f.trials, f.rung, f.hard_violation));
            assert!((b.composite - f.composite).abs() < 1e-12);
        }
    }
}

#[test]
fn other_seed_diverges_at_a_stochastic_decision() {
    let s = load(DEFAULT_SCENARIO);
    let a = run(&s).unwrap();
    let mut diverged = false;
    for seed in 2..6 {
        let b = run(&s.with_seed(seed).unwrap()).unwrap();
        if let ReplayReport::Divergence { seq, .. } = first_divergence(&a.trace, &b.trace) {
            let d = a.decisions.iter().find(|d| d.seq == seq).expect("divergence at a decision");
            assert!(d.entropy > 0.0);
            diverged = true;
        }
    }
    assert!(diverged, "no seed changed the run");
}

#[test]
fn trajectories_follow_the_plot_stride() {
    let s = load(COLLECTOR_FAILS).with_plot_stride(10);
    let r = run(&s).unwrap();
    let mut ticks: BTreeMap<u64, usize> = BTreeMap::new();
    for t in &r.trajectories {
        *ticks.entry(t.tick).or_default() += 1;
    }
    let pairs = s.agents.len() * (s.agents.len() - 1) * 4;
    assert!(ticks.values().all(|n| *n == pairs));
    let last = r.metrics.ticks;
    assert!(ticks.keys().all(|t| t % 10 == 0 || *t == last));
    assert!(ticks.contains_key(&0) && ticks.contains_key(&last));
}

#[test]
fn missing_row_is_a_runtime_error() {
    let text = r#"
schema_version = 1
[maze]
text = """
#######
#S.T.E#
#######
"""
[[agents]]
role = "leader"
heading = "east"
[[cpt.leader]]
when = { next = "open" }
then = { forward = 1.0 }
"#;
    let s = load(text);
    let err = run(&s).unwrap_err();
    assert!(matches!(err, trustmaze::EngineError::Agent { tick: 2, agent: 0, .. }), "{err}");
}

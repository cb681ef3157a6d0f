use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use trustmaze::agents::{ActionKind, Distribution};
use trustmaze::rng::SimRng;
use trustmaze::world::{generate_maze, wall_follow_step, CellKind, Hand, Heading, Maze, MazeParams, Position};

fn open(maze: &Maze) -> BTreeSet<Position> {
    maze.positions().filter(|p| maze.kind(*p) != CellKind::Wall).collect()
}

fn odd() -> impl Strategy<Value = usize> {
    (2usize..=10).prop_map(|n| 2 * n + 1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_mazes_are_trees(w in odd(), h in odd(), seed in any::<u64>()) {
        let m = generate_maze(MazeParams { width: w, height: h, tokens: 2, gates: 1 }, seed).unwrap();
        let cells = open(&m);
        let edges: usize = cells
            .iter()
            .map(|p| m.neighbours(*p).filter(|q| cells.contains(q)).count())
            .sum::<usize>() / 2;
        prop_assert_eq!(edges + 1, cells.len());

        let start = m.starts()[0];
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for q in m.neighbours(p) {
                if cells.contains(&q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        prop_assert_eq!(seen.len(), cells.len());
        prop_assert_eq!(m.exits().len(), 1);
        prop_assert_eq!(m.active_reds(), 2);
    }

    #[test]
    fn same_seed_same_maze(seed in any::<u64>()) {
        let p = MazeParams::default();
        prop_assert_eq!(generate_maze(p, seed).unwrap(), generate_maze(p, seed).unwrap());
    }

    #[test]
    fn wall_follow_stays_on_open_cells(w in odd(), h in odd(), seed in any::<u64>(), right in any::<bool>()) {
        let m = generate_maze(MazeParams { width: w, height: h, tokens: 0, gates: 0 }, seed).unwrap();
        let hand = if right { Hand::Right } else { Hand::Left };
        let (mut pos, mut heading) = (m.starts()[0], Heading::North);
        for _ in 0..4 * m.open_cells() {
            if m.kind(pos) == CellKind::Exit {
                break;
            }
            let (next, h2) = wall_follow_step(&m, pos, heading, hand);
            prop_assert!(m.is_open(next));
            prop_assert!(next.manhattan(pos) <= 1);
            pos = next;
            heading = h2;
        }
        prop_assert_eq!(m.kind(pos), CellKind::Exit);
    }

    #[test]
    fn samples_stay_in_support(weights in prop::collection::vec(0.0..1.0f64, 1..6), u in 0.0..1.0f64) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let entries: Vec<(ActionKind, f64)> = ActionKind::ALL
            .iter()
            .zip(&weights)
            .map(|(k, w)| (*k, w / total))
            .collect();
        let d = Distribution::new(entries.clone());
        let k = d.sample(u).unwrap();
        let mass = entries.iter().find(|(e, _)| e == k).map(|(_, p)| *p).unwrap();
        prop_assert!(mass > 0.0);
        prop_assert!(d.entropy() >= 0.0 && d.entropy() <= (entries.len() as f64).log2() + 1e-9);
    }

    #[test]
    fn agent_streams_are_reproducible(seed in any::<u64>(), agent in 0usize..8, tick in 0u64..1000) {
        let mut a = SimRng::for_agent(seed, agent, tick);
        let mut b = SimRng::for_agent(seed, agent, tick);
        for _ in 0..4 {
            let u = a.uniform();
            prop_assert!((0.0..1.0).contains(&u));
            prop_assert_eq!(u, b.uniform());
        }
    }
}

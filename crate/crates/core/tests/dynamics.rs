mod common;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use route_incentives::dynamics::{check_unique_convergence, run, step, ProtocolState, Schedule};
use route_incentives::equilibria::{build_line_spe, build_tree_spe, ring_special_profile};
use route_incentives::{
    play_strategy, ActionProfile, ClippedActions, GameSpec, NodeId, PlayerStrategy, Reward,
    Strategy, StrategyProfile, TieBreak, Topology,
};

use common::cascade;

fn rounds(sets: &[&[u32]]) -> Vec<BTreeSet<NodeId>> {
    sets.iter()
        .map(|s| s.iter().map(|&p| NodeId(p)).collect())
        .collect()
}

/// Tables non-decreasing in the incoming reward.
fn monotone_tables(t: &Topology, rd: Reward, rng: &mut ChaCha8Rng) -> StrategyProfile {
    let mut s = StrategyProfile::new();
    for &p in t.players() {
        let candidates = t.candidates(p).unwrap();
        if candidates.is_empty() {
            continue;
        }
        let mut prev = vec![0; candidates.len()];
        let mut table = BTreeMap::new();
        for x in 0..=rd {
            if x >= 2 {
                for y in prev.iter_mut() {
                    *y = rng.gen_range(*y..x);
                }
            }
            table.insert(x, prev.clone());
        }
        s.insert(p, PlayerStrategy { candidates, table });
    }
    s
}

fn random_actions(t: &Topology, rd: Reward, rng: &mut ChaCha8Rng) -> ActionProfile {
    let mut a = ActionProfile::new();
    for &p in t.players() {
        let m = t.candidates(p).unwrap().len();
        a.set(p, (0..m).map(|_| rng.gen_range(0..=rd)).collect());
    }
    a
}

fn instances() -> Vec<Topology> {
    let mut v: Vec<Topology> = (1..=9).map(|k| Topology::line(k).unwrap()).collect();
    v.extend((2..=5).map(|k| Topology::ring(k).unwrap()));
    v.push(Topology::complete_tree(2, 2).unwrap());
    v.push(Topology::star(9).unwrap());
    v.push(
        Topology::new(
            NodeId(0),
            (0..10).map(NodeId),
            [
                (0, 1),
                (0, 2),
                (1, 3),
                (1, 4),
                (2, 5),
                (3, 6),
                (3, 7),
                (5, 8),
                (8, 9),
            ]
            .map(|(a, b)| (NodeId(a), NodeId(b))),
        )
        .unwrap(),
    );
    v
}

#[test]
fn line_three_is_schedule_independent() {
    let g = GameSpec::new(Topology::line(3).unwrap(), 3);
    let s = build_line_spe(3, 3).unwrap();
    let first = run(&g, &s, &Schedule::random(g.topology(), 0, 5), 100).unwrap();
    assert!(first.converged && first.outcome.is_spanning());
    for seed in 0..100 {
        let r = run(&g, &s, &Schedule::random(g.topology(), seed, 5), 100).unwrap();
        assert!(r.converged);
        assert_eq!(r.outcome, first.outcome, "seed {seed}");
    }
}

#[test]
fn leaf_first_schedule() {
    let t = Topology::line(3).unwrap();
    let g = GameSpec::new(t.clone(), 3);
    let s = build_line_spe(3, 3).unwrap();
    let sched = Schedule::from_rounds(&t, rounds(&[&[3], &[2], &[1]]), 3).unwrap();
    let mut st = ProtocolState::new(&g);
    assert!(!step(&g, &s, &mut st, sched.round(0)).unwrap());
    assert!(st.best(&t, NodeId(3)).unwrap().is_none());
    let r = run(&g, &s, &sched, 20).unwrap();
    assert!(r.converged);
    assert_eq!(r.outcome, play_strategy(&g, &s).unwrap());
}

#[test]
fn constructed_profiles_converge_on_small_instances() {
    for t in instances() {
        for rd in [0, 1, 3, 5, 8, 11] {
            let g = GameSpec::new(t.clone(), rd);
            let c = if t.shape().satisfies(route_incentives::Shape::Tree) {
                check_unique_convergence(&g, &build_tree_spe(rd, &t).unwrap(), 50, rd).unwrap()
            } else if t.depth() > 2 {
                check_unique_convergence(
                    &g,
                    &ring_special_profile(&t, TieBreak::LowestId, rd).unwrap(),
                    50,
                    rd,
                )
                .unwrap()
            } else {
                continue;
            };
            assert!(
                c.converged && c.unanimous,
                "rd={rd} {}: {:?}",
                t.to_json(),
                c.counterexample
            );
        }
    }
}

#[test]
fn arbitrary_actions_converge_to_the_cascade() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in instances() {
        for _ in 0..4 {
            let rd = rng.gen_range(0..=11);
            let a = random_actions(&t, rd, &mut rng);
            let g = GameSpec::new(t.clone(), rd);
            let s = ClippedActions(a.clone());
            let c = check_unique_convergence(&g, &s, 50, 17).unwrap();
            assert!(c.converged && c.unanimous);
            // Independent cascade agrees with the reference tree.
            let r = cascade(&t, rd, &|p, x| {
                a.get(p)
                    .unwrap()
                    .iter()
                    .map(|&y| y.min(x.saturating_sub(1)))
                    .collect()
            });
            for (id, p) in c.reference.players() {
                assert_eq!(p.parent(), r[id].parent);
            }
        }
    }
}

#[test]
fn single_trial() {
    let g = GameSpec::new(Topology::ring(3).unwrap(), 3);
    let s = ring_special_profile(g.topology(), TieBreak::LowestId, 3).unwrap();
    let c = check_unique_convergence(&g, &s, 1, 0).unwrap();
    assert_eq!(c.trials, 1);
    assert!(c.converged && c.unanimous);
}

/// Round of the last state change under `sched`.
fn last_change<S: Strategy + ?Sized>(g: &GameSpec, s: &S, sched: &Schedule, limit: usize) -> usize {
    let mut st = ProtocolState::new(g);
    let mut last = 0;
    for r in 0..limit {
        if step(g, s, &mut st, sched.round(r)).unwrap() {
            last = r + 1;
        }
    }
    last
}

#[test]
fn settles_within_one_window_per_stage() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in instances() {
        for seed in 0..10 {
            let rd = rng.gen_range(1..=11);
            let s = ClippedActions(random_actions(&t, rd, &mut rng));
            let g = GameSpec::new(t.clone(), rd);
            let sched = Schedule::random(&t, seed, t.depth() + 2);
            let bound = t.depth() * sched.window();
            assert!(last_change(&g, &s, &sched, bound + 2 * sched.window()) <= bound);
        }
    }
}

/// Stored rewards per round; `None` when the player holds no route.
fn stored_history<S: Strategy + ?Sized>(
    g: &GameSpec,
    s: &S,
    sched: &Schedule,
) -> Vec<BTreeMap<NodeId, Option<Reward>>> {
    let t = g.topology();
    let mut st = ProtocolState::new(g);
    let mut out = Vec::new();
    for r in 0..(t.depth() + 2) * sched.window() {
        step(g, s, &mut st, sched.round(r)).unwrap();
        out.push(
            t.players()
                .iter()
                .map(|&p| (p, st.best(t, p).unwrap().map(|o| o.reward)))
                .collect(),
        );
    }
    out
}

#[test]
fn stored_rewards_never_drop_under_monotone_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut diamonds = instances();
    diamonds.push(
        Topology::new(
            NodeId(0),
            (0..6).map(NodeId),
            [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)]
                .map(|(a, b)| (NodeId(a), NodeId(b))),
        )
        .unwrap(),
    );
    for t in diamonds {
        for seed in 0..8 {
            let rd = rng.gen_range(1..=11);
            let s = monotone_tables(&t, rd, &mut rng);
            let g = GameSpec::new(t.clone(), rd);
            let hist = stored_history(&g, &s, &Schedule::random(&t, seed, t.depth() + 2));
            for w in hist.windows(2) {
                for (p, before) in &w[0] {
                    assert!(
                        w[1][p] >= *before,
                        "{p} dropped from {before:?} to {:?}",
                        w[1][p]
                    );
                }
            }
        }
    }
}

#[test]
fn lowered_offer_acts_as_a_withdrawal() {
    // Player 3 hears 2 from player 1 first, passes 1 on, then hears 3 from
    // player 2 and stops offering. Player 4 loses its route.
    let t = Topology::new(
        NodeId(0),
        (0..5).map(NodeId),
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)].map(|(a, b)| (NodeId(a), NodeId(b))),
    )
    .unwrap();
    let mut s = StrategyProfile::new();
    let table = |rows: &[Reward]| {
        rows.iter()
            .enumerate()
            .map(|(x, &y)| (x as Reward, vec![y]))
            .collect()
    };
    s.insert(
        NodeId(1),
        PlayerStrategy {
            candidates: vec![NodeId(3)],
            table: table(&[0, 0, 1, 2, 2]),
        },
    );
    s.insert(
        NodeId(2),
        PlayerStrategy {
            candidates: vec![NodeId(3)],
            table: table(&[0, 0, 1, 2, 3]),
        },
    );
    s.insert(
        NodeId(3),
        PlayerStrategy {
            candidates: vec![NodeId(4)],
            table: table(&[0, 0, 1, 0, 0]),
        },
    );
    let g = GameSpec::new(t.clone(), 4);
    let sched =
        Schedule::from_rounds(&t, rounds(&[&[1], &[3], &[4], &[2], &[3], &[4]]), 6).unwrap();
    let hist = stored_history(&g, &s, &sched);
    assert_eq!(hist[2][&NodeId(4)], Some(1));
    assert_eq!(hist[5][&NodeId(4)], None);
    let r = run(&g, &s, &sched, 60).unwrap();
    assert!(r.converged);
    assert_eq!(r.outcome, play_strategy(&g, &s).unwrap());
    assert!(!r.outcome.participates(NodeId(4)));
}

mod common;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use route_incentives::equilibria::build_line_spe;
use route_incentives::stage::{
    best_response_cycle, iterated_strict_dominance, iterated_strict_dominance_with, pure_nash,
    reduce_to_normal_form, EliminationOrder, Stage2Resolution,
};
use route_incentives::{
    is_nash, is_subgame_perfect, stages, GameSpec, History, NodeId, PlayerStrategy, Reward,
    StrategyProfile, Topology,
};

use common::{cascade, ref_utility};

fn table_profile(t: &Topology, tables: &BTreeMap<NodeId, Vec<Vec<Reward>>>) -> StrategyProfile {
    let mut s = StrategyProfile::new();
    for (&p, rows) in tables {
        s.insert(
            p,
            PlayerStrategy {
                candidates: t.candidates(p).unwrap(),
                table: rows
                    .iter()
                    .enumerate()
                    .map(|(x, a)| (x as Reward, a.clone()))
                    .collect(),
            },
        );
    }
    s
}

#[test]
fn stage_maps() {
    let line = stages(&Topology::line(3).unwrap());
    assert_eq!(line.values().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
    let ring = stages(&Topology::ring(3).unwrap());
    for (p, k) in ring {
        assert_eq!(k, (p.0 as usize).div_ceil(2));
    }
    assert!(stages(&Topology::star(4).unwrap())
        .values()
        .all(|&k| k == 1));
}

#[test]
fn line_profile_is_nash_and_perfect() {
    let g = GameSpec::new(Topology::line(3).unwrap(), 3);
    let s = build_line_spe(3, 3).unwrap();
    assert!(is_nash(&g, &s, &History::root(&g)).unwrap().holds());
    assert!(is_subgame_perfect(&g, &s).unwrap().holds());
}

#[test]
fn forcing_the_lower_tied_offer_keeps_equilibrium() {
    // Player 1 offering 1 instead of 2 at r_d = 3 earns 2 + 2 either way.
    let g = GameSpec::new(Topology::line(3).unwrap(), 3);
    let mut s = build_line_spe(3, 3).unwrap();
    let mut p1 = s.get(NodeId(1)).unwrap().clone();
    p1.table.insert(3, vec![1]);
    s.insert(NodeId(1), p1);
    assert!(is_nash(&g, &s, &History::root(&g)).unwrap().holds());
    assert!(is_subgame_perfect(&g, &s).unwrap().holds());
    assert!(!route_incentives::play_strategy(&g, &s)
        .unwrap()
        .is_spanning());
}

#[test]
fn refusing_a_sale_is_caught_at_the_deeper_history() {
    let g = GameSpec::new(Topology::line(3).unwrap(), 3);
    let mut s = build_line_spe(3, 3).unwrap();
    let mut p2 = s.get(NodeId(2)).unwrap().clone();
    p2.table.insert(2, vec![0]);
    s.insert(NodeId(2), p2);
    let v = is_subgame_perfect(&g, &s).unwrap();
    let w = v.witness().unwrap();
    assert_eq!(w.player, NodeId(2));
    assert_eq!(w.history.offers(), &[2]);
    assert_eq!(
        (w.on_path.clone(), w.alternative.clone(), w.gain()),
        (vec![0], vec![1], 1)
    );
}

#[test]
fn three_stage_ring_at_six_has_no_equilibrium_profile() {
    // Any profile: the stage-1 players face the matrix game, which has no
    // pure equilibrium. A sample of profiles built from the matrix actions
    // all fail at the root.
    let t = Topology::ring(3).unwrap();
    let g = GameSpec::new(t.clone(), 6);
    let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
    assert!(pure_nash(&m).is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..40 {
        let mut tables = BTreeMap::new();
        for p in 1..=4u32 {
            let rows = (0..=6u64)
                .map(|x| vec![if x <= 1 { 0 } else { rng.gen_range(0..x) }])
                .collect();
            tables.insert(NodeId(p), rows);
        }
        let s = table_profile(&t, &tables);
        assert!(!is_nash(&g, &s, &History::root(&g)).unwrap().holds());
        assert!(!is_subgame_perfect(&g, &s).unwrap().holds());
    }
}

/// Strategy-level brute force: does any complete alternative table for one
/// player beat its current payoff, everyone else fixed?
fn brute_force_nash(t: &Topology, rd: Reward, tables: &BTreeMap<NodeId, Vec<Vec<Reward>>>) -> bool {
    let play = |tabs: &BTreeMap<NodeId, Vec<Vec<Reward>>>| {
        cascade(t, rd, &|p, x| tabs[&p][x as usize].clone())
    };
    let base = play(tables);
    for (&p, rows) in tables {
        let u0 = ref_utility(t, &base, p);
        let arity = rows[0].len();
        // Each incoming x allows max(x, 1)^arity actions.
        let choices: Vec<Vec<Vec<Reward>>> = (0..=rd)
            .map(|x| {
                let bound = x.max(1);
                let mut all = vec![vec![]];
                for _ in 0..arity {
                    all = all
                        .into_iter()
                        .flat_map(|v: Vec<Reward>| {
                            (0..bound).map(move |y| {
                                let mut w = v.clone();
                                w.push(y);
                                w
                            })
                        })
                        .collect();
                }
                all
            })
            .collect();
        let mut idx = vec![0usize; choices.len()];
        'odometer: loop {
            let mut alt = tables.clone();
            alt.insert(
                p,
                idx.iter()
                    .enumerate()
                    .map(|(x, &i)| choices[x][i].clone())
                    .collect(),
            );
            if ref_utility(t, &play(&alt), p) > u0 {
                return false;
            }
            for x in 0..idx.len() {
                idx[x] += 1;
                if idx[x] < choices[x].len() {
                    continue 'odometer;
                }
                idx[x] = 0;
            }
            break;
        }
    }
    true
}

#[test]
fn single_action_deviations_agree_with_strategy_enumeration() {
    let tree = Topology::new(
        NodeId(0),
        (0..4).map(NodeId),
        [(0, 1), (1, 2), (1, 3)].map(|(a, b)| (NodeId(a), NodeId(b))),
    )
    .unwrap();
    let cases = [
        (Topology::line(2).unwrap(), 5),
        (Topology::line(3).unwrap(), 5),
        (Topology::line(4).unwrap(), 4),
        (Topology::ring(2).unwrap(), 5),
        (tree, 3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut disagreements = 0;
    let mut equilibria = 0;
    for (t, rd_max) in cases {
        for rd in 1..=rd_max {
            for trial in 0..12 {
                let mut tables = BTreeMap::new();
                for &p in t.players() {
                    let arity = t.candidates(p).unwrap().len();
                    if arity == 0 {
                        continue;
                    }
                    let rows: Vec<Vec<Reward>> = (0..=rd)
                        .map(|x| {
                            (0..arity)
                                .map(|_| if x <= 1 { 0 } else { rng.gen_range(0..x) })
                                .collect()
                        })
                        .collect();
                    tables.insert(p, rows);
                }
                // Mix in the constructed profile so equilibria are represented.
                let s = if trial == 0 && t.shape().satisfies(route_incentives::Shape::Tree) {
                    let s = route_incentives::equilibria::build_tree_spe(rd, &t).unwrap();
                    tables = s
                        .players()
                        .map(|(&p, ps)| (p, ps.table.values().cloned().collect()))
                        .collect();
                    s
                } else {
                    table_profile(&t, &tables)
                };
                let g = GameSpec::new(t.clone(), rd);
                let lib = is_nash(&g, &s, &History::root(&g)).unwrap().holds();
                let oracle = brute_force_nash(&t, rd, &tables);
                equilibria += usize::from(oracle);
                if lib != oracle {
                    disagreements += 1;
                }
            }
        }
    }
    assert_eq!(disagreements, 0);
    assert!(equilibria > 0);
}

#[test]
fn perfection_implies_nash_on_random_profiles() {
    let t = Topology::line(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut perfect = 0;
    for _ in 0..400 {
        let rd = rng.gen_range(1..=5u64);
        let mut tables = BTreeMap::new();
        for p in 1..=2u32 {
            let rows = (0..=rd)
                .map(|x| vec![if x <= 1 { 0 } else { rng.gen_range(0..x) }])
                .collect();
            tables.insert(NodeId(p), rows);
        }
        let s = table_profile(&t, &tables);
        let g = GameSpec::new(t.clone(), rd);
        if is_subgame_perfect(&g, &s).unwrap().holds() {
            perfect += 1;
            assert!(is_nash(&g, &s, &History::root(&g)).unwrap().holds());
        }
    }
    assert!(perfect > 0);
}

/// Payoffs of the 3-stage ring computed directly: players 3 and 4 play the
/// stage-2 equilibrium chosen by the documented rule, player 5 buys from the
/// higher bid (left on ties).
fn ring_cell(rd: Reward, r1: Reward, r2: Reward) -> (i64, i64) {
    let buys_left = |r3: Reward, r4: Reward| -> Option<bool> {
        match (r3 >= 1, r4 >= 1) {
            (false, false) => None,
            _ => Some(r3 >= r4),
        }
    };
    let pay = |r3: Reward, r4: Reward| -> (i64, i64) {
        match buys_left(r3, r4) {
            Some(true) => ((r1 - r3) as i64, 0),
            Some(false) => (0, (r2 - r4) as i64),
            None => (0, 0),
        }
    };
    let range = |r: Reward| 0..r.max(1);
    let mut ne = Vec::new();
    for r3 in range(r1) {
        for r4 in range(r2) {
            let (u3, u4) = pay(r3, r4);
            if range(r1).all(|x| pay(x, r4).0 <= u3) && range(r2).all(|x| pay(r3, x).1 <= u4) {
                ne.push((r3, r4));
            }
        }
    }
    let left_wins = r1 >= r2;
    let (r3, r4) = ne
        .iter()
        .copied()
        .filter(|&(a, b)| buys_left(a, b) == Some(left_wins))
        .filter(|&(a, b)| {
            if left_wins {
                b == r2.saturating_sub(1)
            } else {
                a == r1.saturating_sub(1)
            }
        })
        .min_by_key(|&(a, b)| if left_wins { a } else { b })
        .unwrap_or(ne[0]);
    let d1 = if r1 >= 1 {
        1 + usize::from(buys_left(r3, r4) == Some(true) && r3 >= 1)
    } else {
        0
    };
    let d2 = if r2 >= 1 {
        1 + usize::from(buys_left(r3, r4) == Some(false) && r4 >= 1)
    } else {
        0
    };
    ((rd - r1) as i64 * d1 as i64, (rd - r2) as i64 * d2 as i64)
}

#[test]
fn ring_matrix_matches_direct_computation() {
    for rd in 1..=9 {
        let g = GameSpec::new(Topology::ring(3).unwrap(), rd);
        let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
        for (i, &r1) in m.rows.iter().enumerate() {
            for (j, &r2) in m.cols.iter().enumerate() {
                assert_eq!(
                    m.payoffs[i][j],
                    ring_cell(rd, r1, r2),
                    "rd={rd} cell ({r1},{r2})"
                );
            }
        }
    }
}

#[test]
fn six_gives_the_documented_cells() {
    let g = GameSpec::new(Topology::ring(3).unwrap(), 6);
    let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
    assert_eq!(m.payoff(2, 1), Some((8, 5)));
    assert_eq!(m.payoff(2, 3), Some((4, 6)));
    assert_eq!(m.payoff(3, 1), Some((6, 5)));
    assert_eq!(m.payoff(3, 3), Some((6, 3)));
    let d = iterated_strict_dominance(&m);
    assert_eq!(
        (d.reduced.rows.clone(), d.reduced.cols.clone()),
        (vec![2, 3], vec![1, 3])
    );
    assert!(pure_nash(&d.reduced).is_empty());
    let w = best_response_cycle(&m, (2, 1)).unwrap();
    assert!(!w.fixed_point);
    assert_eq!(w.cycle.len(), 4);
}

#[test]
fn unit_reward_matrix_is_trivial() {
    let g = GameSpec::new(Topology::ring(3).unwrap(), 1);
    let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
    assert_eq!(m.payoffs, vec![vec![(0, 0)]]);
    assert_eq!(pure_nash(&m), vec![(0, 0)]);
}

#[test]
fn equilibrium_boundary_at_five() {
    let ring = Topology::ring(3).unwrap();
    for rd in 1..=12 {
        let m = reduce_to_normal_form(&GameSpec::new(ring.clone(), rd), Stage2Resolution::Searched)
            .unwrap();
        assert_eq!(pure_nash(&m).is_empty(), rd >= 6, "rd={rd}");
    }
}

#[test]
fn three_reduces_to_a_set_with_an_equilibrium() {
    let g = GameSpec::new(Topology::ring(3).unwrap(), 3);
    let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
    let d = iterated_strict_dominance(&m);
    assert!(!d.reduced.rows.is_empty() && !d.reduced.cols.is_empty());
    assert!(!pure_nash(&d.reduced).is_empty());
}

#[test]
fn five_contains_two_one() {
    let g = GameSpec::new(Topology::ring(3).unwrap(), 5);
    let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
    assert!(pure_nash(&m).contains(&(2, 1)));
}

#[test]
fn walks_at_five_end_in_the_equilibrium() {
    let g = GameSpec::new(Topology::ring(3).unwrap(), 5);
    let m = reduce_to_normal_form(&g, Stage2Resolution::Searched).unwrap();
    let ne = pure_nash(&m);
    for &r in &m.rows {
        for &c in &m.cols {
            let w = best_response_cycle(&m, (r, c)).unwrap();
            assert!(
                w.fixed_point,
                "walk from ({r},{c}) cycles through {:?}",
                w.cycle
            );
            assert!(ne.contains(&w.cycle[0]));
        }
    }
}

#[test]
fn elimination_order_does_not_matter() {
    let ring = Topology::ring(3).unwrap();
    for res in [Stage2Resolution::Searched, Stage2Resolution::Literal] {
        for rd in 1..=12 {
            let m = reduce_to_normal_form(&GameSpec::new(ring.clone(), rd), res).unwrap();
            let a = iterated_strict_dominance_with(&m, EliminationOrder::Alternating);
            let b = iterated_strict_dominance_with(&m, EliminationOrder::ColumnsFirst);
            assert_eq!(a.reduced, b.reduced, "rd={rd} {res:?}");
        }
    }
}

#[test]
fn literal_rule_keeps_an_equilibrium_above_five() {
    // The closed-form stage-2 rule lets the loser stay below its cap, and the
    // resulting matrix keeps (2, 1) as an equilibrium.
    let ring = Topology::ring(3).unwrap();
    for rd in 4..=12 {
        let m = reduce_to_normal_form(&GameSpec::new(ring.clone(), rd), Stage2Resolution::Literal)
            .unwrap();
        assert!(pure_nash(&m).contains(&(2, 1)), "rd={rd}");
    }
}

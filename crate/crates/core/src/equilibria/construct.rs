use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::growth::growth_reward;
use crate::error::{Error, Result};
use crate::game::{select, TieBreak, COST};
use crate::stage::{PlayerStrategy, StrategyProfile};
use crate::topology::{NodeId, Shape, Topology};
use crate::Reward;

/// Backward-induction tables for a tree.
struct TreeTables {
    /// `reach[i][x]`: participants in the subtree of `i` when it receives `x`.
    reach: Vec<Vec<u64>>,
    /// `action[i][x]`: offers to each child of `i` when it receives `x`.
    action: Vec<Vec<Vec<Reward>>>,
}

fn tree_tables(t: &Topology, r_max: Reward) -> TreeTables {
    let lay = t.layout();
    let n = t.node_count();
    let width = r_max as usize + 1;
    let mut reach = vec![Vec::new(); n];
    let mut action = vec![Vec::new(); n];
    for k in (1..=lay.depth).rev() {
        for &i in &lay.by_stage[k] {
            let mut ri = vec![0u64; width];
            let mut ai = vec![vec![0; lay.children[i].len()]; width];
            for x in 0..=r_max {
                if x < COST {
                    continue;
                }
                let mut total = 1;
                for (c, &j) in lay.children[i].iter().enumerate() {
                    // Ties go to the larger offer so the route reaches further.
                    let (y, r) = (0..x)
                        .map(|y| (y, reach[j][y as usize]))
                        .max_by_key(|&(y, r)| ((x - y) as u128 * r as u128, y))
                        .expect("x >= 1");
                    ai[x as usize][c] = y;
                    total += r;
                }
                ri[x as usize] = total;
            }
            reach[i] = ri;
            action[i] = ai;
        }
    }
    TreeTables { reach, action }
}

fn player_strategy(t: &Topology, i: usize, rows: &[Vec<Reward>]) -> PlayerStrategy {
    PlayerStrategy {
        candidates: t.layout().children[i].iter().map(|&c| t.id(c)).collect(),
        table: rows
            .iter()
            .enumerate()
            .map(|(x, a)| (x as Reward, a.clone()))
            .collect(),
    }
}

/// Subgame-perfect profile on a tree: every player offers each child the
/// reward maximizing `(x - y) * reach_child(y)`, preferring larger `y` on ties.
///
/// Tables cover incoming rewards `0..=r_d`. Leaves are omitted.
pub fn build_tree_spe(r_d: Reward, t: &Topology) -> Result<StrategyProfile> {
    t.require_shape(Shape::Tree)?;
    let tab = tree_tables(t, r_d);
    let mut s = StrategyProfile::new();
    for i in 1..t.node_count() {
        if !t.layout().children[i].is_empty() {
            s.insert(t.id(i), player_strategy(t, i, &tab.action[i]));
        }
    }
    Ok(s)
}

/// [`build_tree_spe`] on the line `d - 1 - ... - k`.
pub fn build_line_spe(r_d: Reward, k: usize) -> Result<StrategyProfile> {
    if k == 0 {
        return Err(Error::Invalid("a line needs at least one player".into()));
    }
    build_tree_spe(r_d, &Topology::line(k)?)
}

/// Participants a line player at `stage` (of `k`) brings in when receiving `x`
/// under the line profile.
pub fn line_reach(k: usize, stage: usize, x: Reward) -> Result<u64> {
    let t = Topology::line(k)?;
    let i = t.idx(NodeId(stage as u32))?;
    Ok(tree_tables(&t, x).reach[i][x as usize])
}

/// Both stage-1 players of the 2-stage ring undercut to `r_d - 1`.
pub fn build_ring2_ne(r_d: Reward) -> Result<StrategyProfile> {
    let t = Topology::ring(2)?;
    let rows: Vec<Vec<Reward>> = (0..=r_d).map(|x| vec![x.saturating_sub(1)]).collect();
    let mut s = StrategyProfile::new();
    for id in [NodeId(1), NodeId(2)] {
        s.insert(id, player_strategy(&t, t.idx(id)?, &rows));
    }
    Ok(s)
}

/// The spanning profile of the `k`-stage ring at `r_d* = f(k)`.
///
/// The chain through the bottom player's preferred parent copies the line
/// profile. The other chain copies it one stage deeper, and its last player
/// concedes the bottom player by offering nothing.
pub fn build_ring_special(k: usize) -> Result<(BigUint, StrategyProfile)> {
    if k <= 2 {
        return Err(Error::Invalid(format!(
            "the special ring profile needs K > 2, got {k}"
        )));
    }
    let r = growth_reward(k)?;
    let t = Topology::ring(k)?;
    let s = ring_special_profile(&t, TieBreak::default(), r)?;
    Ok((BigUint::from(r), s))
}

/// [`build_ring_special`] on any even ring, with tables up to `r_max`.
pub fn ring_special_profile(
    t: &Topology,
    tiebreak: TieBreak,
    r_max: Reward,
) -> Result<StrategyProfile> {
    t.require_shape(Shape::Ring)?;
    let k = t.depth();
    if k <= 2 {
        return Err(Error::Invalid(format!(
            "the special ring profile needs K > 2, got {k}"
        )));
    }
    let lay = t.layout();
    let bottom = lay.by_stage[k][0];
    let parents = &lay.parents[bottom];
    let (winner, _) = select(parents.iter().map(|&p| (t.id(p), COST)), tiebreak, COST)
        .expect("bottom has two parents");
    let winner = t.idx(winner)?;
    let loser = *parents.iter().find(|&&p| p != winner).expect("two parents");

    let chain = |mut last: usize| {
        let mut c = vec![last];
        while lay.stage[last] > 1 {
            last = lay.parents[last][0];
            c.push(last);
        }
        c.reverse();
        c
    };
    let (left, right) = (chain(winner), chain(loser));

    let line = Topology::line(k)?;
    let tab = tree_tables(&line, r_max);
    let line_rows = |stage: usize| &tab.action[stage];

    let mut s = StrategyProfile::new();
    for (j, &i) in left.iter().enumerate() {
        s.insert(t.id(i), player_strategy(t, i, line_rows(j + 1)));
    }
    for (j, &i) in right.iter().enumerate() {
        let rows = if j + 1 == right.len() {
            vec![vec![0]; r_max as usize + 1]
        } else {
            line_rows(j + 2).clone()
        };
        s.insert(t.id(i), player_strategy(t, i, &rows));
    }
    Ok(s)
}

/// Offers of every player along the cascade, in id order.
pub fn on_path_offers(
    g: &crate::game::GameSpec,
    s: &StrategyProfile,
) -> Result<BTreeMap<NodeId, Vec<Reward>>> {
    let o = crate::play::play_strategy(g, s)?;
    Ok(o.players()
        .filter(|(_, p)| p.participates() && !p.offers.is_empty())
        .map(|(&id, p)| (id, p.offers.iter().map(|&(_, r)| r).collect()))
        .collect())
}

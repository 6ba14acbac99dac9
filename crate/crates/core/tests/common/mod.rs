//! Reference implementations written directly from the game rules, kept
//! separate from the library's cascade so the two can be compared.

#![allow(dead_code)]

use std::collections::BTreeMap;

use route_incentives::{NodeId, Reward, Topology};

/// Per-player result of a reference cascade.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefPlayer {
    pub parent: Option<NodeId>,
    pub received: Reward,
    pub offers: Vec<Reward>,
    pub delta: usize,
}

impl RefPlayer {
    pub fn participates(&self) -> bool {
        self.parent.is_some()
    }
}

/// Plays the staged game with lowest-id tie-breaking. `action(player,
/// incoming)` gives the offers to the player's next-stage neighbors.
pub fn cascade(
    t: &Topology,
    rd: Reward,
    action: &dyn Fn(NodeId, Reward) -> Vec<Reward>,
) -> BTreeMap<NodeId, RefPlayer> {
    let d = t.destination();
    let mut out: BTreeMap<NodeId, RefPlayer> = BTreeMap::new();
    // Offers each player sees, keyed by sender.
    let mut inbound: BTreeMap<NodeId, Vec<(NodeId, Reward)>> = BTreeMap::new();
    for p in t.stage_players(1) {
        inbound.entry(p).or_default().push((d, rd));
    }
    for k in 1..=t.depth() {
        for p in t.stage_players(k) {
            let mut me = RefPlayer::default();
            let mut best: Option<(NodeId, Reward)> = None;
            for &(from, r) in inbound.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
                if r < 1 {
                    continue;
                }
                best = match best {
                    Some((bf, br)) if br > r || (br == r && bf < from) => Some((bf, br)),
                    _ => Some((from, r)),
                };
            }
            let cands = t.candidates(p).unwrap();
            if let Some((from, r)) = best {
                me.parent = Some(from);
                me.received = r;
                me.offers = if cands.is_empty() {
                    vec![]
                } else {
                    action(p, r)
                };
                for (c, &y) in cands.iter().zip(&me.offers) {
                    assert!(y == 0 || y < r, "reference cascade: {p} offers {y} on {r}");
                    inbound.entry(*c).or_default().push((p, y));
                }
            } else {
                me.offers = vec![0; cands.len()];
            }
            out.insert(p, me);
        }
    }
    // Downstream counts by walking every participant's route.
    let ids: Vec<NodeId> = out.keys().copied().collect();
    for p in ids {
        let mut cur = out[&p].parent;
        while let Some(c) = cur {
            if c == d {
                break;
            }
            out.get_mut(&c).unwrap().delta += 1;
            cur = out[&c].parent;
        }
    }
    out
}

/// Utility `(r - 1) + sum over buyers j of (r - r_ij)(delta_j + 1)`.
pub fn ref_utility(t: &Topology, res: &BTreeMap<NodeId, RefPlayer>, p: NodeId) -> i64 {
    let me = &res[&p];
    if !me.participates() {
        return 0;
    }
    let r = me.received as i64;
    let mut u = r - 1;
    for (c, &y) in t.candidates(p).unwrap().iter().zip(&me.offers) {
        if res[c].parent == Some(p) {
            u += (r - y as i64) * (res[c].delta as i64 + 1);
        }
    }
    u
}

/// Profit term only.
pub fn ref_profit(t: &Topology, res: &BTreeMap<NodeId, RefPlayer>, p: NodeId) -> i64 {
    let me = &res[&p];
    if !me.participates() {
        return 0;
    }
    ref_utility(t, res, p) - (me.received as i64 - 1)
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Every connected graph on the destination `0` and players `1..=n`.
pub fn connected_graphs(n: u32) -> Vec<Topology> {
    let nodes: Vec<u32> = (0..=n).collect();
    let pairs: Vec<(u32, u32)> = nodes
        .iter()
        .flat_map(|&a| nodes.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << pairs.len()) {
        let edges: Vec<(NodeId, NodeId)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &(a, b))| (NodeId(a), NodeId(b)))
            .collect();
        if let Ok(t) = Topology::new(NodeId(0), nodes.iter().map(|&x| NodeId(x)), edges) {
            out.push(t);
        }
    }
    out
}

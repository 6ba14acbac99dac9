//! Outcome trees, per-player utility and their JSON/DOT renderings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::play::Playout;
use crate::topology::NodeId;
use crate::Reward;

/// Utility split into the participation term `r - c` and the resale profit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Utility {
    pub participation: i64,
    pub profit: i64,
}

impl Utility {
    pub fn total(&self) -> i64 {
        self.participation + self.profit
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlayerOutcome {
    /// Route `R_i` from the player to the destination; empty when the player
    /// does not participate.
    pub route: Vec<NodeId>,
    pub received: Reward,
    /// Rewards exported to each candidate neighbor.
    pub offers: Vec<(NodeId, Reward)>,
    /// `N_i`: players whose route passes through this one.
    pub downstream: BTreeSet<NodeId>,
    pub utility: Utility,
}

impl PlayerOutcome {
    pub fn participates(&self) -> bool {
        !self.route.is_empty()
    }

    /// `δ_i = |N_i|`.
    pub fn delta(&self) -> usize {
        self.downstream.len()
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.route.get(1).copied()
    }
}

/// The routes chosen by every player, rooted at the destination.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeTree {
    destination: NodeId,
    players: BTreeMap<NodeId, PlayerOutcome>,
}

impl OutcomeTree {
    pub(crate) fn from_playout(g: &GameSpec, p: &Playout) -> OutcomeTree {
        let t = g.topology();
        let n = t.node_count();
        let mut downstream: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
        let mut players = BTreeMap::new();
        for i in 1..n {
            let mut route = Vec::new();
            if p.parent[i].is_some() {
                let mut cur = Some(i);
                while let Some(c) = cur {
                    route.push(t.id(c));
                    if c != i && c != 0 {
                        downstream[c].insert(t.id(i));
                    }
                    cur = if c == 0 { None } else { p.parent[c] };
                }
            }
            let offers = t.layout().children[i]
                .iter()
                .zip(&p.offers[i])
                .map(|(&c, &y)| (t.id(c), y))
                .collect();
            players.insert(
                t.id(i),
                PlayerOutcome {
                    route,
                    received: p.received[i],
                    offers,
                    downstream: BTreeSet::new(),
                    utility: p.utility(g, i),
                },
            );
        }
        for (i, set) in downstream.into_iter().enumerate().skip(1) {
            players.get_mut(&t.id(i)).expect("player").downstream = set;
        }
        OutcomeTree {
            destination: t.destination(),
            players,
        }
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn player(&self, id: NodeId) -> Option<&PlayerOutcome> {
        self.players.get(&id)
    }

    pub fn players(&self) -> impl Iterator<Item = (&NodeId, &PlayerOutcome)> {
        self.players.iter()
    }

    pub fn participates(&self, id: NodeId) -> bool {
        self.player(id).is_some_and(PlayerOutcome::participates)
    }

    pub fn delta(&self, id: NodeId) -> Option<usize> {
        self.player(id).map(PlayerOutcome::delta)
    }

    pub fn route(&self, id: NodeId) -> Option<&[NodeId]> {
        self.player(id).map(|p| p.route.as_slice())
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.player(id).and_then(PlayerOutcome::parent)
    }

    pub fn is_spanning(&self) -> bool {
        self.players.values().all(PlayerOutcome::participates)
    }

    pub fn participant_count(&self) -> usize {
        self.players.values().filter(|p| p.participates()).count()
    }

    /// Tree edges `(child, parent)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.players
            .iter()
            .filter_map(|(&id, p)| p.parent().map(|par| (id, par)))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let players: Vec<serde_json::Value> = self
            .players
            .iter()
            .map(|(id, p)| {
                serde_json::json!({
                    "id": id.to_string(),
                    "participates": p.participates(),
                    "route": p.route.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "received": p.received.to_string(),
                    "offers": p.offers.iter()
                        .map(|(to, r)| serde_json::json!({"to": to.to_string(), "reward": r.to_string()}))
                        .collect::<Vec<_>>(),
                    "delta": p.delta().to_string(),
                    "utility": p.utility.total().to_string(),
                    "participation_term": p.utility.participation.to_string(),
                    "profit_term": p.utility.profit.to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "destination": self.destination.to_string(),
            "spanning": self.is_spanning(),
            "players": players,
        })
    }

    /// Graphviz rendering: edges follow chosen routes toward the destination,
    /// labels carry `δ_i` and utility.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph outcome {\n  rankdir=BT;\n");
        let _ = writeln!(
            s,
            "  \"{}\" [shape=doublecircle, label=\"d={}\"];",
            self.destination, self.destination
        );
        for (id, p) in &self.players {
            let style = if p.participates() {
                ""
            } else {
                ", style=dashed"
            };
            let _ = writeln!(
                s,
                "  \"{id}\" [label=\"{id}\\nδ={}\\nu={}\"{style}];",
                p.delta(),
                p.utility.total()
            );
        }
        for (child, parent) in self.edges() {
            let r = self.players[&child].received;
            let _ = writeln!(s, "  \"{child}\" -> \"{parent}\" [label=\"{r}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// Eq. (1) style utility of `player` in `o`, split into its two terms.
pub fn utility(g: &GameSpec, o: &OutcomeTree, player: NodeId) -> Result<Utility> {
    if player == g.topology().destination() || !g.topology().contains(player) {
        return Err(Error::UnknownPlayer(player));
    }
    o.player(player)
        .map(|p| p.utility)
        .ok_or(Error::UnknownPlayer(player))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::play::outcome_from_actions;
    use crate::stage::ActionProfile;
    use crate::topology::Topology;

    #[test]
    fn utility_decomposes_on_the_line() {
        let g = GameSpec::new(Topology::line(3).unwrap(), 3);
        let a = ActionProfile::new().with(1, vec![2]).with(2, vec![1]);
        let o = outcome_from_actions(&g, &a).unwrap();
        let u1 = utility(&g, &o, NodeId(1)).unwrap();
        assert_eq!(u1.profit, 2);
        assert_eq!(u1.participation, 2);
        assert_eq!(u1.total(), 4);
        let u3 = utility(&g, &o, NodeId(3)).unwrap();
        assert_eq!(
            u3,
            Utility {
                participation: 0,
                profit: 0
            }
        );
    }

    #[test]
    fn non_participant_has_zero_utility() {
        let g = GameSpec::new(Topology::line(2).unwrap(), 1);
        let o = outcome_from_actions(&g, &ActionProfile::new()).unwrap();
        assert_eq!(utility(&g, &o, NodeId(2)).unwrap().total(), 0);
        assert!(utility(&g, &o, NodeId(0)).is_err());
        assert!(utility(&g, &o, NodeId(7)).is_err());
    }

    #[test]
    fn dot_and_json_render_the_tree() {
        let g = GameSpec::new(Topology::line(2).unwrap(), 2);
        let a = ActionProfile::new().with(1, vec![1]);
        let o = outcome_from_actions(&g, &a).unwrap();
        let dot = o.to_dot();
        assert!(dot.contains("\"2\" -> \"1\""));
        assert!(dot.contains("δ=1"));
        let v = o.to_json_value();
        assert_eq!(v["spanning"], true);
        assert_eq!(v["players"][0]["delta"], "1");
    }
}

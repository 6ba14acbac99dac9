//! Game instances and Highest Reward Path route selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};
use crate::Reward;

/// Cost of participation. Fixed at one unit of reward.
pub const COST: Reward = 1;

/// Consistent rule a player uses among equally rewarding offers.
///
/// On the numbered ring, the bottom player's left parent has the lower id, so
/// [`TieBreak::LowestId`] is the left-parent preference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestId,
    HighestId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    topology: Topology,
    reward: Reward,
    cost: Reward,
    tiebreak: TieBreak,
}

impl GameSpec {
    pub fn new(topology: Topology, reward: Reward) -> Self {
        GameSpec {
            topology,
            reward,
            cost: COST,
            tiebreak: TieBreak::default(),
        }
    }

    pub fn with_tiebreak(mut self, tiebreak: TieBreak) -> Self {
        self.tiebreak = tiebreak;
        self
    }

    /// Only unit cost is supported.
    pub fn with_cost(self, cost: Reward) -> Result<Self> {
        if cost != COST {
            return Err(Error::UnsupportedCost(cost));
        }
        Ok(self)
    }

    pub fn with_reward(&self, reward: Reward) -> Self {
        GameSpec {
            reward,
            ..self.clone()
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Initial reward `r_d` promised by the destination.
    pub fn reward(&self) -> Reward {
        self.reward
    }

    pub fn cost(&self) -> Reward {
        self.cost
    }

    pub fn tiebreak(&self) -> TieBreak {
        self.tiebreak
    }
}

/// A promised reward from `from` to `to` for distributing along `route`.
/// A reward of zero is no offer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RewardOffer {
    pub from: NodeId,
    pub to: NodeId,
    pub reward: Reward,
    /// Nodes from `from` to the destination, both inclusive.
    pub route: Vec<NodeId>,
}

/// Picks the offer with the highest reward among those worth at least `cost`.
pub fn hrp_select(
    offers: &[RewardOffer],
    tiebreak: TieBreak,
    cost: Reward,
) -> Option<&RewardOffer> {
    let best = select(offers.iter().map(|o| (o.from, o.reward)), tiebreak, cost)?;
    offers
        .iter()
        .find(|o| o.from == best.0 && o.reward == best.1)
}

/// Core of [`hrp_select`] over bare `(sender, reward)` pairs.
pub(crate) fn select(
    offers: impl IntoIterator<Item = (NodeId, Reward)>,
    tiebreak: TieBreak,
    cost: Reward,
) -> Option<(NodeId, Reward)> {
    let mut best: Option<(NodeId, Reward)> = None;
    for (from, reward) in offers {
        if reward == 0 || reward < cost {
            continue;
        }
        let better = match best {
            None => true,
            Some((bf, br)) => {
                reward > br
                    || (reward == br
                        && match tiebreak {
                            TieBreak::LowestId => from < bf,
                            TieBreak::HighestId => from > bf,
                        })
            }
        };
        if better {
            best = Some((from, reward));
        }
    }
    best
}

use thiserror::Error;

use crate::topology::NodeId;
use crate::Reward;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("topology is empty: the destination has no neighbors")]
    NoPlayers,
    #[error("destination {0} is not a node of the topology")]
    MissingDestination(NodeId),
    #[error("edge ({0}, {1}) references an unknown node")]
    UnknownNode(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("topology is disconnected: {0} cannot reach the destination")]
    Disconnected(NodeId),
    #[error("cycle of odd length {0} is not a supported ring")]
    OddRing(usize),
    #[error("expected a {expected} topology, found {found}")]
    WrongShape {
        expected: &'static str,
        found: &'static str,
    },
    #[error("node {0} is not a player of this game")]
    UnknownPlayer(NodeId),
    #[error("cost must be 1, got {0}")]
    UnsupportedCost(Reward),
    #[error("player {player} offers {offered} while receiving {incoming}: rewards must strictly decrease")]
    NotDecreasing {
        player: NodeId,
        offered: Reward,
        incoming: Reward,
    },
    #[error("player {player} returned {got} rewards for {expected} candidate neighbors")]
    ActionArity {
        player: NodeId,
        expected: usize,
        got: usize,
    },
    #[error("strategy of player {player} is undefined for incoming reward {incoming}")]
    StrategyNotTotal { player: NodeId, incoming: Reward },
    #[error(
        "player {player} cannot take route through {via}: no acceptable offer from that neighbor"
    )]
    InvalidRoute { player: NodeId, via: NodeId },
    #[error("history for stage {stage} has {got} offers, expected {expected}")]
    HistoryShape {
        stage: usize,
        expected: usize,
        got: usize,
    },
    #[error("no pure equilibrium continuation exists at stage {stage}")]
    NoContinuation { stage: usize },
    #[error("value {0} does not fit into a 64-bit reward")]
    RewardOverflow(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

//! Route-distribution incentive games.
//!
//! A destination `d` hands a reward `r_d` to its neighbors. Each player that
//! accepts an offer pays a unit cost, picks the highest-reward parent and may
//! resell strictly smaller rewards to the players one hop further away. The
//! crate models the resulting fixed-schedule game, checks Nash and subgame
//! perfection, builds the known equilibria, and simulates the asynchronous
//! protocol whose outcome they predict.

pub mod cli;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod game;
pub mod outcome;
pub mod play;
pub mod stage;
pub mod topology;

/// Rewards are non-negative integers; the unit cost is `1`.
pub type Reward = u64;

pub use error::{Error, Result};
pub use game::{hrp_select, GameSpec, RewardOffer, TieBreak, COST};
pub use outcome::{utility, OutcomeTree, PlayerOutcome, Utility};
pub use play::{outcome_from_actions, play_strategy, RouteChoice};
pub use stage::{
    is_nash, is_subgame_perfect, ActionProfile, ClippedActions, History, PlayerStrategy, Strategy,
    StrategyProfile, Verdict, View,
};
pub use topology::{stages, validate_topology, NodeId, Shape, ShapeInfo, Topology, TopologyFile};

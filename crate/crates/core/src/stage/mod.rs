//! The fixed-schedule multi-stage game: histories, strategies and their
//! verification.
//!
//! Players act once, at the stage given by their hop distance from the
//! destination. Continuation play after stage `k` depends only on the offers
//! made into stage `k + 1`, so a [`History`] is kept in that compact form.

mod normal_form;
mod profile_file;
mod verify;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::topology::{NodeId, Topology};
use crate::Reward;

pub use normal_form::{
    best_response_cycle, iterated_strict_dominance, iterated_strict_dominance_with, pure_nash,
    reduce_to_normal_form, BestResponseWalk, Dominance, Elimination, EliminationOrder,
    NormalFormMatrix, Side, Stage2Resolution,
};
pub use profile_file::{PlayerEntry, ProfileFile};
pub use verify::{is_nash, is_subgame_perfect, DeviationWitness, Verdict};

pub use crate::topology::stages;

/// Offers made into the players of one stage, one reward per offer slot
/// (see [`Topology::offer_slots`]). At stage 1 every slot holds `r_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    stage: usize,
    offers: Vec<Reward>,
}

impl History {
    /// `h^1 = (r_d)`.
    pub fn root(g: &GameSpec) -> History {
        let slots = g.topology().layout().incoming[1].len();
        History {
            stage: 1,
            offers: vec![g.reward(); slots],
        }
    }

    pub fn new(t: &Topology, stage: usize, offers: Vec<Reward>) -> Result<History> {
        let expected = t
            .layout()
            .incoming
            .get(stage)
            .filter(|_| stage >= 1)
            .map(Vec::len)
            .ok_or_else(|| Error::Invalid(format!("stage {stage} does not exist")))?;
        if offers.len() != expected {
            return Err(Error::HistoryShape {
                stage,
                expected,
                got: offers.len(),
            });
        }
        Ok(History { stage, offers })
    }

    pub(crate) fn from_parts(stage: usize, offers: Vec<Reward>) -> History {
        History { stage, offers }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn offers(&self) -> &[Reward] {
        &self.offers
    }

    /// Offer from `from` to `to` in this history, if that slot exists.
    pub fn offer(&self, t: &Topology, from: NodeId, to: NodeId) -> Option<Reward> {
        let (s, r) = (t.idx(from).ok()?, t.idx(to).ok()?);
        let pos = t.layout().incoming[self.stage]
            .iter()
            .position(|&slot| slot == (s, r))?;
        Some(self.offers[pos])
    }
}

/// What a player sees when it moves.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    pub player: NodeId,
    pub stage: usize,
    /// Reward on the route the player selected.
    pub incoming: Reward,
    /// Number of candidate neighbors the action must cover.
    pub arity: usize,
    pub history: &'a History,
}

/// A pure strategy for every player: maps what a player observes to the
/// rewards it offers its candidate neighbors (in id order).
pub trait Strategy {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>>;
}

impl<S: Strategy + ?Sized> Strategy for &S {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        (**self).action(view)
    }
}

/// A player's strategy as a table from incoming reward to action vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlayerStrategy {
    pub candidates: Vec<NodeId>,
    pub table: BTreeMap<Reward, Vec<Reward>>,
}

/// Serializable strategy profile; each player conditions on its incoming reward.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StrategyProfile {
    players: BTreeMap<NodeId, PlayerStrategy>,
}

impl StrategyProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, player: NodeId, strategy: PlayerStrategy) {
        self.players.insert(player, strategy);
    }

    pub fn get(&self, player: NodeId) -> Option<&PlayerStrategy> {
        self.players.get(&player)
    }

    pub fn players(&self) -> impl Iterator<Item = (&NodeId, &PlayerStrategy)> {
        self.players.iter()
    }

    /// `s_i(x)`.
    pub fn action_at(&self, player: NodeId, incoming: Reward) -> Option<&[Reward]> {
        self.players
            .get(&player)?
            .table
            .get(&incoming)
            .map(Vec::as_slice)
    }

    /// Checks candidate lists against `g` and that every entry for the
    /// reachable incoming rewards exists and strictly decreases.
    pub fn validate(&self, g: &GameSpec) -> Result<()> {
        let t = g.topology();
        for (&p, ps) in &self.players {
            if !t.contains(p) || p == t.destination() {
                return Err(Error::UnknownPlayer(p));
            }
            let cands = t.candidates(p)?;
            if ps.candidates != cands {
                return Err(Error::ActionArity {
                    player: p,
                    expected: cands.len(),
                    got: ps.candidates.len(),
                });
            }
            for (&x, action) in &ps.table {
                if action.len() != cands.len() {
                    return Err(Error::ActionArity {
                        player: p,
                        expected: cands.len(),
                        got: action.len(),
                    });
                }
                if let Some(&bad) = action.iter().find(|&&y| y != 0 && y >= x) {
                    return Err(Error::NotDecreasing {
                        player: p,
                        offered: bad,
                        incoming: x,
                    });
                }
            }
        }
        for &p in t.players() {
            if t.candidates(p)?.is_empty() {
                continue;
            }
            let stage = t.stage_of(p)?;
            let reach = g.reward().saturating_sub(stage as Reward - 1);
            for x in 0..=reach {
                if self.action_at(p, x).is_none() {
                    return Err(Error::StrategyNotTotal {
                        player: p,
                        incoming: x,
                    });
                }
            }
        }
        Ok(())
    }
}

impl Strategy for StrategyProfile {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        if view.arity == 0 {
            return Ok(Vec::new());
        }
        self.action_at(view.player, view.incoming)
            .map(<[Reward]>::to_vec)
            .ok_or(Error::StrategyNotTotal {
                player: view.player,
                incoming: view.incoming,
            })
    }
}

/// One fixed action vector per player, regardless of what it observes.
/// Players absent from the map export nothing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionProfile {
    actions: BTreeMap<NodeId, Vec<Reward>>,
}

impl ActionProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, player: NodeId, action: Vec<Reward>) -> &mut Self {
        self.actions.insert(player, action);
        self
    }

    pub fn with(mut self, player: u32, action: Vec<Reward>) -> Self {
        self.actions.insert(NodeId(player), action);
        self
    }

    pub fn get(&self, player: NodeId) -> Option<&[Reward]> {
        self.actions.get(&player).map(Vec::as_slice)
    }

    /// Assigns single-reward actions to the players with exactly one
    /// candidate neighbor, in ascending id order.
    pub fn from_sequence(t: &Topology, rewards: &[Reward]) -> Result<Self> {
        let movers: Vec<NodeId> = t
            .players()
            .iter()
            .copied()
            .filter(|&p| t.candidates(p).map(|c| c.len() == 1).unwrap_or(false))
            .collect();
        if rewards.len() > movers.len() {
            return Err(Error::Invalid(format!(
                "{} rewards for {} single-candidate players",
                rewards.len(),
                movers.len()
            )));
        }
        let mut out = ActionProfile::new();
        for (p, &r) in movers.into_iter().zip(rewards) {
            out.set(p, vec![r]);
        }
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, &Vec<Reward>)> {
        self.actions.iter()
    }
}

impl Strategy for ActionProfile {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        Ok(self
            .actions
            .get(&view.player)
            .cloned()
            .unwrap_or_else(|| vec![0; view.arity]))
    }
}

/// Fixed actions capped just below whatever the player receives, so every
/// history stays legal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClippedActions(pub ActionProfile);

impl Strategy for ClippedActions {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        let cap = view.incoming.saturating_sub(1);
        let mut a = self.0.action(view)?;
        for y in &mut a {
            *y = (*y).min(cap);
        }
        Ok(a)
    }
}

/// Odometer over action vectors `y` with `0 <= y[c] < bound` for every
/// candidate `c`.
#[derive(Debug, Clone)]
pub(crate) struct ActionSpace {
    bound: Reward,
    current: Option<Vec<Reward>>,
}

impl ActionSpace {
    pub(crate) fn new(incoming: Reward, arity: usize) -> Self {
        // With nothing received, the only action is to export nothing.
        let bound = incoming.max(1);
        ActionSpace {
            bound,
            current: Some(vec![0; arity]),
        }
    }

    pub(crate) fn size(incoming: Reward, arity: usize) -> u128 {
        (incoming.max(1) as u128).saturating_pow(arity as u32)
    }
}

impl Iterator for ActionSpace {
    type Item = Vec<Reward>;

    fn next(&mut self) -> Option<Vec<Reward>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut carry = true;
        for y in next.iter_mut().rev() {
            if !carry {
                break;
            }
            *y += 1;
            if *y == self.bound {
                *y = 0;
            } else {
                carry = false;
            }
        }
        self.current = if carry { None } else { Some(next) };
        Some(out)
    }
}

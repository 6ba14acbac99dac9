//! Stage-by-stage cascade of the fixed-schedule game.

use crate::error::{Error, Result};
use crate::game::{select, GameSpec};
use crate::outcome::{OutcomeTree, Utility};
use crate::stage::{ActionProfile, History, Strategy, View};
use crate::topology::NodeId;
use crate::Reward;

/// How a player picks its route. Everyone but an auditing deviator uses HRP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    Hrp,
    Via(NodeId),
    Decline,
}

/// A single player's forced behavior, overriding the strategy.
#[derive(Debug, Clone)]
pub(crate) struct Override<'a> {
    pub player: usize,
    pub route: RouteChoice,
    pub action: &'a [Reward],
}

/// Result of playing a subgame from a history to the last stage.
#[derive(Debug, Clone)]
pub(crate) struct Playout {
    pub start: usize,
    pub received: Vec<Reward>,
    pub parent: Vec<Option<usize>>,
    /// Per node, aligned with its candidate neighbors.
    pub offers: Vec<Vec<Reward>>,
    /// History at each stage from `start` on.
    pub histories: Vec<History>,
    pub delta: Vec<usize>,
}

impl Playout {
    pub fn history_at(&self, stage: usize) -> &History {
        &self.histories[stage - self.start]
    }

    pub fn participates(&self, i: usize) -> bool {
        self.parent[i].is_some()
    }

    pub fn utility(&self, g: &GameSpec, i: usize) -> Utility {
        let Some(_) = self.parent[i] else {
            return Utility::default();
        };
        let r = self.received[i] as i64;
        let lay = g.topology().layout();
        let profit = lay.children[i]
            .iter()
            .zip(&self.offers[i])
            .filter(|(&j, _)| self.parent[j] == Some(i))
            .map(|(&j, &y)| (r - y as i64) * (self.delta[j] as i64 + 1))
            .sum();
        Utility {
            participation: r - g.cost() as i64,
            profit,
        }
    }

    pub fn participants(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }
}

/// HRP (or overridden) route selection for the receivers of `h`.
pub(crate) fn receive(
    g: &GameSpec,
    h: &History,
    dev: Option<&Override<'_>>,
    received: &mut [Reward],
    parent: &mut [Option<usize>],
) -> Result<()> {
    let t = g.topology();
    let slots = &t.layout().incoming[h.stage()];
    let mut start = 0;
    while start < slots.len() {
        let receiver = slots[start].1;
        let mut end = start;
        while end < slots.len() && slots[end].1 == receiver {
            end += 1;
        }
        let mut offers = (start..end).map(|k| (t.id(slots[k].0), h.offers()[k]));
        let choice = match dev.filter(|d| d.player == receiver).map(|d| d.route) {
            None | Some(RouteChoice::Hrp) => select(offers, g.tiebreak(), g.cost()),
            Some(RouteChoice::Decline) => None,
            Some(RouteChoice::Via(via)) => {
                let picked = offers.rfind(|&(from, r)| from == via && r >= g.cost() && r > 0);
                if picked.is_none() {
                    return Err(Error::InvalidRoute {
                        player: t.id(receiver),
                        via,
                    });
                }
                picked
            }
        };
        match choice {
            Some((from, r)) => {
                parent[receiver] = Some(t.idx(from)?);
                received[receiver] = r;
            }
            None => {
                parent[receiver] = None;
                received[receiver] = 0;
            }
        }
        start = end;
    }
    Ok(())
}

/// Checks arity and strict decrease of an exported action.
pub(crate) fn check_action(
    player: NodeId,
    incoming: Reward,
    arity: usize,
    action: &[Reward],
) -> Result<()> {
    if action.len() != arity {
        return Err(Error::ActionArity {
            player,
            expected: arity,
            got: action.len(),
        });
    }
    if let Some(&bad) = action.iter().find(|&&y| y != 0 && y >= incoming) {
        return Err(Error::NotDecreasing {
            player,
            offered: bad,
            incoming,
        });
    }
    Ok(())
}

/// Offers into stage `stage + 1` from the actions of stage `stage`.
pub(crate) fn next_history(g: &GameSpec, stage: usize, offers: &[Vec<Reward>]) -> History {
    let lay = g.topology().layout();
    let slots = &lay.incoming[stage + 1];
    let rewards = slots
        .iter()
        .map(|&(s, r)| {
            let pos = lay.children[s]
                .iter()
                .position(|&c| c == r)
                .expect("slot receiver is a candidate of its sender");
            offers[s].get(pos).copied().unwrap_or(0)
        })
        .collect();
    History::from_parts(stage + 1, rewards)
}

pub(crate) fn play<S: Strategy + ?Sized>(
    g: &GameSpec,
    s: &S,
    at: &History,
    dev: Option<&Override<'_>>,
) -> Result<Playout> {
    let t = g.topology();
    let lay = t.layout();
    let expected = lay.incoming.get(at.stage()).map(Vec::len);
    if at.stage() == 0 || expected != Some(at.offers().len()) {
        return Err(Error::HistoryShape {
            stage: at.stage(),
            expected: expected.unwrap_or(0),
            got: at.offers().len(),
        });
    }
    let n = t.node_count();
    let mut out = Playout {
        start: at.stage(),
        received: vec![0; n],
        parent: vec![None; n],
        offers: lay.children.iter().map(|c| vec![0; c.len()]).collect(),
        histories: Vec::with_capacity(lay.depth + 1 - at.stage()),
        delta: vec![0; n],
    };
    let mut h = at.clone();
    for k in at.stage()..=lay.depth {
        receive(g, &h, dev, &mut out.received, &mut out.parent)?;
        for &i in &lay.by_stage[k] {
            let arity = lay.children[i].len();
            if arity == 0 || out.parent[i].is_none() {
                continue;
            }
            let id = t.id(i);
            let action = match dev.filter(|d| d.player == i) {
                Some(d) => d.action.to_vec(),
                None => s.action(&View {
                    player: id,
                    stage: k,
                    incoming: out.received[i],
                    arity,
                    history: &h,
                })?,
            };
            check_action(id, out.received[i], arity, &action)?;
            out.offers[i] = action;
        }
        let next = (k < lay.depth).then(|| next_history(g, k, &out.offers));
        out.histories.push(h);
        match next {
            Some(nh) => h = nh,
            None => break,
        }
    }
    for k in (at.stage()..=lay.depth).rev() {
        for &i in &lay.by_stage[k] {
            if let Some(p) = out.parent[i] {
                let d = out.delta[i] + 1;
                out.delta[p] += d;
            }
        }
    }
    Ok(out)
}

/// Plays the whole cascade from `h^1` under a strategy.
pub fn play_strategy<S: Strategy + ?Sized>(g: &GameSpec, s: &S) -> Result<OutcomeTree> {
    let p = play(g, s, &History::root(g), None)?;
    Ok(OutcomeTree::from_playout(g, &p))
}

/// Outcome of fixed per-player actions under the fixed schedule.
///
/// Participants must offer strictly less than they receive; non-participants
/// export nothing whatever their listed action.
pub fn outcome_from_actions(g: &GameSpec, actions: &ActionProfile) -> Result<OutcomeTree> {
    play_strategy(g, actions)
}

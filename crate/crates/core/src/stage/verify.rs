use rayon::prelude::*;

use super::{ActionSpace, History, Strategy};
use crate::error::Result;
use crate::game::GameSpec;
use crate::play::{play, Override, RouteChoice};
use crate::topology::NodeId;
use crate::Reward;

/// A strictly profitable one-action deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationWitness {
    pub player: NodeId,
    /// History at which the deviating player moves.
    pub history: History,
    pub incoming: Reward,
    pub on_path: Vec<Reward>,
    pub alternative: Vec<Reward>,
    pub on_path_utility: i64,
    pub deviation_utility: i64,
}

impl DeviationWitness {
    pub fn gain(&self) -> i64 {
        self.deviation_utility - self.on_path_utility
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equilibrium,
    Deviation(Box<DeviationWitness>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Equilibrium)
    }

    pub fn witness(&self) -> Option<&DeviationWitness> {
        match self {
            Verdict::Equilibrium => None,
            Verdict::Deviation(w) => Some(w),
        }
    }
}

/// Nash check of the subgame starting at `at`.
///
/// Every player moves exactly once, so any unilateral change of strategy is
/// equivalent to changing the single action taken at the history the player
/// actually reaches. Enumerating those actions, with everyone else
/// responding by `s`, is therefore exhaustive.
pub fn is_nash<S: Strategy + ?Sized>(g: &GameSpec, s: &S, at: &History) -> Result<Verdict> {
    deviations(g, s, at, false)
}

/// Nash check at every reachable history of every stage.
///
/// At stage `k` the offers into that stage can take any value up to
/// `r_d - (k - 1)`. Checking only the movers of stage `k` at each such
/// history covers every proper subgame, since later movers are checked at
/// their own histories. Stages are visited last to first, so the witness is
/// the deepest failing subgame.
pub fn is_subgame_perfect<S: Strategy + Sync + ?Sized>(g: &GameSpec, s: &S) -> Result<Verdict> {
    let t = g.topology();
    let lay = t.layout();
    for k in (1..=lay.depth).rev() {
        if lay.by_stage[k].iter().all(|&i| lay.children[i].is_empty()) {
            continue;
        }
        let histories: Vec<History> = if k == 1 {
            vec![History::root(g)]
        } else {
            let cap = g.reward().saturating_sub(k as Reward - 1);
            ActionSpace::new(cap + 1, lay.incoming[k].len())
                .map(|offers| History::from_parts(k, offers))
                .collect()
        };
        let found = histories
            .par_iter()
            .map(|h| deviations(g, s, h, true))
            .find_map_first(|r| match r {
                Ok(Verdict::Equilibrium) => None,
                other => Some(other),
            });
        if let Some(r) = found {
            return r;
        }
    }
    Ok(Verdict::Equilibrium)
}

fn deviations<S: Strategy + ?Sized>(
    g: &GameSpec,
    s: &S,
    at: &History,
    first_stage_only: bool,
) -> Result<Verdict> {
    let lay = g.topology().layout();
    let base = play(g, s, at, None)?;
    let last = if first_stage_only {
        at.stage()
    } else {
        lay.depth
    };
    for k in at.stage()..=last {
        let h = base.history_at(k);
        for &i in &lay.by_stage[k] {
            let arity = lay.children[i].len();
            if arity == 0 || !base.participates(i) {
                continue;
            }
            let incoming = base.received[i];
            let on_path = &base.offers[i];
            let u0 = base.utility(g, i).total();
            let mut best: Option<(i64, Vec<Reward>)> = None;
            for alt in ActionSpace::new(incoming, arity) {
                if &alt == on_path {
                    continue;
                }
                let dev = Override {
                    player: i,
                    route: RouteChoice::Hrp,
                    action: &alt,
                };
                let u = play(g, s, h, Some(&dev))?.utility(g, i).total();
                if u > u0 && best.as_ref().is_none_or(|(b, _)| u > *b) {
                    best = Some((u, alt));
                }
            }
            if let Some((u, alt)) = best {
                return Ok(Verdict::Deviation(Box::new(DeviationWitness {
                    player: g.topology().id(i),
                    history: h.clone(),
                    incoming,
                    on_path: on_path.clone(),
                    alternative: alt,
                    on_path_utility: u0,
                    deviation_utility: u,
                })));
            }
        }
    }
    Ok(Verdict::Equilibrium)
}

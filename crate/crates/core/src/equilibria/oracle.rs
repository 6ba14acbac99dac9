//! Brute-force search for the smallest reward whose game has a spanning Nash
//! equilibrium.
//!
//! Candidates are on-path action profiles with a spanning outcome. Off the
//! path, players follow a [`ContinuationSelector`], which solves each stage
//! game by exhaustive pure-equilibrium search given the continuation of the
//! later stages.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::game::{GameSpec, TieBreak};
use crate::outcome::OutcomeTree;
use crate::play::{next_history, play, receive};
use crate::stage::{is_nash, ActionProfile, ActionSpace, History, Strategy, View};
use crate::topology::{NodeId, Topology};
use crate::Reward;

type StageActions = BTreeMap<NodeId, Vec<Reward>>;
type PathVisitor<'a> = dyn FnMut(&[(History, StageActions)]) -> Result<bool> + 'a;

/// Largest stage game the selector is willing to enumerate.
const MAX_STAGE_PROFILES: u128 = 1 << 20;

/// Continuation strategy defined by backward induction.
///
/// At every history it picks the pure equilibrium of the stage game (later
/// stages played by the selector itself) with the most participants, then
/// the lexicographically largest action profile. Histories whose stage game
/// has no pure equilibrium have no continuation.
pub struct ContinuationSelector {
    g: GameSpec,
    memo: RefCell<HashMap<History, Option<Rc<StageActions>>>>,
}

impl ContinuationSelector {
    pub fn new(t: &Topology, tiebreak: TieBreak) -> Self {
        ContinuationSelector {
            g: GameSpec::new(t.clone(), 0).with_tiebreak(tiebreak),
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Stage actions chosen at `h`, or `None` when there is no pure
    /// equilibrium continuation.
    pub fn select(&self, h: &History) -> Result<Option<Rc<StageActions>>> {
        if let Some(hit) = self.memo.borrow().get(h) {
            return Ok(hit.clone());
        }
        let chosen = self.solve(h)?.map(Rc::new);
        self.memo.borrow_mut().insert(h.clone(), chosen.clone());
        Ok(chosen)
    }

    fn solve(&self, h: &History) -> Result<Option<StageActions>> {
        let g = &self.g;
        let t = g.topology();
        let lay = t.layout();
        let n = t.node_count();
        let (mut received, mut parent) = (vec![0; n], vec![None; n]);
        receive(g, h, None, &mut received, &mut parent)?;
        let movers: Vec<usize> = lay.by_stage[h.stage()]
            .iter()
            .copied()
            .filter(|&i| parent[i].is_some() && !lay.children[i].is_empty())
            .collect();
        if movers.is_empty() {
            return Ok(Some(StageActions::new()));
        }
        let size: u128 = movers
            .iter()
            .map(|&i| ActionSpace::size(received[i], lay.children[i].len()))
            .product();
        if size > MAX_STAGE_PROFILES {
            return Err(Error::Invalid(format!(
                "stage {} game has {size} action profiles",
                h.stage()
            )));
        }
        let acts: Vec<Vec<Vec<Reward>>> = movers
            .iter()
            .map(|&i| ActionSpace::new(received[i], lay.children[i].len()).collect())
            .collect();

        // Mixed-radix index over the movers' action lists.
        let mut strides = vec![1usize; movers.len()];
        for m in (0..movers.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * acts[m + 1].len();
        }
        let total = strides[0] * acts[0].len();
        let digits = |p: usize| -> Vec<usize> {
            (0..movers.len())
                .map(|m| (p / strides[m]) % acts[m].len())
                .collect()
        };

        let mut utils = Vec::with_capacity(total);
        let mut reach = Vec::with_capacity(total);
        for p in 0..total {
            let fixed: StageActions = digits(p)
                .into_iter()
                .enumerate()
                .map(|(m, d)| (t.id(movers[m]), acts[m][d].clone()))
                .collect();
            let s = Fixed {
                stage: h.stage(),
                actions: &fixed,
                rest: self,
            };
            match play(g, &s, h, None) {
                Ok(out) => {
                    utils.push(
                        movers
                            .iter()
                            .map(|&i| out.utility(g, i).total())
                            .collect::<Vec<_>>(),
                    );
                    reach.push(out.participants());
                }
                Err(Error::NoContinuation { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }

        let is_equilibrium = |p: usize| {
            digits(p).into_iter().enumerate().all(|(m, d)| {
                let base = p - d * strides[m];
                (0..acts[m].len()).all(|alt| utils[base + alt * strides[m]][m] <= utils[p][m])
            })
        };
        let profile = |p: usize| {
            digits(p)
                .into_iter()
                .enumerate()
                .map(|(m, d)| acts[m][d].clone())
                .collect::<Vec<_>>()
        };
        let best = (0..total).filter(|&p| is_equilibrium(p)).max_by(|&a, &b| {
            reach[a]
                .cmp(&reach[b])
                .then_with(|| profile(a).cmp(&profile(b)))
        });
        Ok(best.map(|p| {
            digits(p)
                .into_iter()
                .enumerate()
                .map(|(m, d)| (t.id(movers[m]), acts[m][d].clone()))
                .collect()
        }))
    }
}

impl Strategy for ContinuationSelector {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        let chosen = self
            .select(view.history)?
            .ok_or(Error::NoContinuation { stage: view.stage })?;
        chosen.get(&view.player).cloned().ok_or_else(|| {
            Error::Invalid(format!(
                "player {} does not move at this history",
                view.player
            ))
        })
    }
}

/// Fixed actions for one stage, the selector elsewhere.
struct Fixed<'a> {
    stage: usize,
    actions: &'a StageActions,
    rest: &'a ContinuationSelector,
}

impl Strategy for Fixed<'_> {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        match self.actions.get(&view.player) {
            Some(a) if view.stage == self.stage => Ok(a.clone()),
            _ => self.rest.action(view),
        }
    }
}

/// Prescribed actions on the equilibrium path, the selector off it.
struct OnPath<'a> {
    path: HashMap<History, StageActions>,
    rest: &'a ContinuationSelector,
}

impl Strategy for OnPath<'_> {
    fn action(&self, view: &View<'_>) -> Result<Vec<Reward>> {
        match self
            .path
            .get(view.history)
            .and_then(|m| m.get(&view.player))
        {
            Some(a) => Ok(a.clone()),
            None => self.rest.action(view),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningEquilibrium {
    pub rd: Reward,
    /// Actions taken on the equilibrium path.
    pub actions: ActionProfile,
    pub outcome: OutcomeTree,
}

/// Smallest `r_d <= bound` for which some Nash equilibrium of the game
/// started at `r_d` reaches every player, with the default tie-break.
pub fn min_spanning_incentive(t: &Topology, bound: Reward) -> Result<Option<SpanningEquilibrium>> {
    min_spanning_incentive_with(t, bound, TieBreak::default())
}

pub fn min_spanning_incentive_with(
    t: &Topology,
    bound: Reward,
    tiebreak: TieBreak,
) -> Result<Option<SpanningEquilibrium>> {
    let sel = ContinuationSelector::new(t, tiebreak);
    for rd in 0..=bound {
        let g = GameSpec::new(t.clone(), rd).with_tiebreak(tiebreak);
        let root = History::root(&g);
        let mut found = None;
        let mut path = Vec::new();
        spanning_paths(&g, root.clone(), &mut path, &mut |path| {
            let s = OnPath {
                path: path.iter().cloned().collect(),
                rest: &sel,
            };
            match is_nash(&g, &s, &root) {
                Ok(v) if v.holds() => {
                    let mut actions = ActionProfile::new();
                    for (id, a) in path.iter().flat_map(|(_, m)| m) {
                        actions.set(*id, a.clone());
                    }
                    let outcome = crate::play::play_strategy(&g, &s)?;
                    found = Some(SpanningEquilibrium {
                        rd,
                        actions,
                        outcome,
                    });
                    Ok(true)
                }
                Ok(_) | Err(Error::NoContinuation { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        })?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Depth-first walk over stage action profiles that keep every player
/// reachable. `visit` returns `true` to stop.
fn spanning_paths(
    g: &GameSpec,
    h: History,
    path: &mut Vec<(History, StageActions)>,
    visit: &mut PathVisitor<'_>,
) -> Result<bool> {
    let t = g.topology();
    let lay = t.layout();
    let n = t.node_count();
    let k = h.stage();
    let (mut received, mut parent) = (vec![0; n], vec![None; n]);
    receive(g, &h, None, &mut received, &mut parent)?;
    if lay.by_stage[k].iter().any(|&i| parent[i].is_none()) {
        return Ok(false);
    }
    if k == lay.depth {
        return visit(path);
    }
    let movers: Vec<usize> = lay.by_stage[k]
        .iter()
        .copied()
        .filter(|&i| !lay.children[i].is_empty())
        .collect();
    let spaces: Vec<Vec<Vec<Reward>>> = movers
        .iter()
        .map(|&i| ActionSpace::new(received[i], lay.children[i].len()).collect())
        .collect();
    let mut digits = vec![0usize; movers.len()];
    loop {
        let mut offers: Vec<Vec<Reward>> = lay.children.iter().map(|c| vec![0; c.len()]).collect();
        let mut stage_actions = StageActions::new();
        for (m, &i) in movers.iter().enumerate() {
            offers[i] = spaces[m][digits[m]].clone();
            stage_actions.insert(t.id(i), offers[i].clone());
        }
        let next = next_history(g, k, &offers);
        path.push((h.clone(), stage_actions));
        let stop = spanning_paths(g, next, path, visit)?;
        path.pop();
        if stop {
            return Ok(true);
        }
        // Advance the odometer; the last mover varies fastest.
        let mut m = movers.len();
        loop {
            if m == 0 {
                return Ok(false);
            }
            m -= 1;
            digits[m] += 1;
            if digits[m] < spaces[m].len() {
                break;
            }
            digits[m] = 0;
        }
    }
}

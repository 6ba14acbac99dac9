//! Asynchronous path-vector dynamics under HRP.
//!
//! Players wake up according to a [`Schedule`], read the offers waiting in
//! their inbox, keep the best one and re-advertise to their candidate
//! neighbors whenever their strategy's action changes. Messages sent during a
//! round are delivered after it.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{select, GameSpec, RewardOffer};
use crate::outcome::OutcomeTree;
use crate::play::{check_action, play_strategy, Playout};
use crate::stage::{History, Strategy, View};
use crate::topology::{NodeId, Topology};
use crate::Reward;

/// Activation sets, one per round, grouped into fairness windows.
///
/// Every window activates every player at least once. Runs longer than the
/// schedule cycle back to its first round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    rounds: Vec<BTreeSet<NodeId>>,
    window: usize,
}

impl Schedule {
    /// One player per round in ascending id order; the window is one pass.
    pub fn round_robin(t: &Topology) -> Schedule {
        Schedule {
            rounds: t.players().iter().map(|&p| BTreeSet::from([p])).collect(),
            window: t.player_count(),
        }
    }

    /// `windows` windows, each `n` uniformly drawn non-empty subsets followed
    /// by a round-robin pass.
    pub fn random(t: &Topology, seed: u64, windows: usize) -> Schedule {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let players = t.players();
        let n = players.len();
        let mut rounds = Vec::with_capacity(2 * n * windows);
        for _ in 0..windows.max(1) {
            for _ in 0..n {
                loop {
                    let set: BTreeSet<NodeId> = players
                        .iter()
                        .copied()
                        .filter(|_| rng.gen_bool(0.5))
                        .collect();
                    if !set.is_empty() {
                        rounds.push(set);
                        break;
                    }
                }
            }
            rounds.extend(players.iter().map(|&p| BTreeSet::from([p])));
        }
        Schedule {
            rounds,
            window: 2 * n,
        }
    }

    /// Explicit rounds; every consecutive block of `window` rounds must
    /// activate every player.
    pub fn from_rounds(
        t: &Topology,
        rounds: Vec<BTreeSet<NodeId>>,
        window: usize,
    ) -> Result<Schedule> {
        if window == 0 || rounds.is_empty() || !rounds.len().is_multiple_of(window) {
            return Err(Error::Invalid(format!(
                "{} rounds do not split into windows of {window}",
                rounds.len()
            )));
        }
        for r in &rounds {
            if let Some(&p) = r
                .iter()
                .find(|p| !t.contains(**p) || **p == t.destination())
            {
                return Err(Error::UnknownPlayer(p));
            }
        }
        for (w, block) in rounds.chunks(window).enumerate() {
            let seen: BTreeSet<NodeId> = block.iter().flatten().copied().collect();
            if let Some(&p) = t.players().iter().find(|p| !seen.contains(p)) {
                return Err(Error::Invalid(format!(
                    "window {w} never activates player {p}"
                )));
            }
        }
        Ok(Schedule { rounds, window })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn rounds(&self) -> &[BTreeSet<NodeId>] {
        &self.rounds
    }

    pub fn round(&self, r: usize) -> &BTreeSet<NodeId> {
        &self.rounds[r % self.rounds.len()]
    }
}

/// Per-player protocol state, indexed densely with the destination at `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolState {
    best: Vec<Option<RewardOffer>>,
    /// Latest non-zero offer from each sender.
    rib_in: Vec<BTreeMap<usize, Reward>>,
    inbox: Vec<Vec<(usize, Reward)>>,
    /// Last action advertised to the candidate neighbors.
    emitted: Vec<Option<Vec<Reward>>>,
    round: usize,
}

impl ProtocolState {
    /// The destination has just advertised `r_d` to its neighbors.
    pub fn new(g: &GameSpec) -> ProtocolState {
        let t = g.topology();
        let n = t.node_count();
        let mut inbox = vec![Vec::new(); n];
        for &j in &t.layout().children[0] {
            inbox[j].push((0, g.reward()));
        }
        ProtocolState {
            best: vec![None; n],
            rib_in: vec![BTreeMap::new(); n],
            inbox,
            emitted: vec![None; n],
            round: 0,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn best(&self, t: &Topology, player: NodeId) -> Result<Option<&RewardOffer>> {
        Ok(self.best[t.idx(player)?].as_ref())
    }

    pub fn inbox_len(&self, t: &Topology, player: NodeId) -> Result<usize> {
        Ok(self.inbox[t.idx(player)?].len())
    }

    pub fn emitted(&self, t: &Topology, player: NodeId) -> Result<Option<&[Reward]>> {
        Ok(self.emitted[t.idx(player)?].as_deref())
    }

    pub fn quiescent(&self) -> bool {
        self.inbox.iter().all(Vec::is_empty)
    }

    /// Offers currently held by the receivers of `stage`, in slot order.
    fn snapshot(&self, t: &Topology, stage: usize) -> History {
        let offers = t.layout().incoming[stage]
            .iter()
            .map(|&(s, r)| self.rib_in[r].get(&s).copied().unwrap_or(0))
            .collect();
        History::from_parts(stage, offers)
    }

    fn route(&self, t: &Topology, from: usize) -> Vec<NodeId> {
        let mut route = vec![t.id(from)];
        let mut cur = from;
        while cur != 0 {
            match &self.best[cur] {
                Some(o) => {
                    cur = t.idx(o.from).expect("known sender");
                    route.push(o.from);
                }
                None => break,
            }
        }
        route
    }

    /// The tree of currently stored routes.
    pub fn outcome(&self, g: &GameSpec) -> OutcomeTree {
        let t = g.topology();
        let lay = t.layout();
        let n = t.node_count();
        let parent: Vec<Option<usize>> = (0..n)
            .map(|i| {
                self.best[i]
                    .as_ref()
                    .map(|o| t.idx(o.from).expect("known sender"))
            })
            .collect();
        let received = (0..n)
            .map(|i| self.best[i].as_ref().map_or(0, |o| o.reward))
            .collect();
        let offers = (0..n)
            .map(|i| match (&parent[i], &self.emitted[i]) {
                (Some(_), Some(a)) => a.clone(),
                _ => vec![0; lay.children[i].len()],
            })
            .collect();
        let mut delta = vec![0; n];
        for k in (1..=lay.depth).rev() {
            for &i in &lay.by_stage[k] {
                if let Some(p) = parent[i] {
                    delta[p] += delta[i] + 1;
                }
            }
        }
        let p = Playout {
            start: 1,
            received,
            parent,
            offers,
            histories: Vec::new(),
            delta,
        };
        OutcomeTree::from_playout(g, &p)
    }
}

/// One round: the `activated` players read their inboxes, select by HRP and
/// advertise if their action changed. Returns whether anything changed.
pub fn step<S: Strategy + ?Sized>(
    g: &GameSpec,
    s: &S,
    st: &mut ProtocolState,
    activated: &BTreeSet<NodeId>,
) -> Result<bool> {
    let t = g.topology();
    let lay = t.layout();
    let ids: Vec<usize> = activated
        .iter()
        .map(|&p| t.player_idx(p))
        .collect::<Result<_>>()?;
    let mut changed = false;

    for &i in &ids {
        for (from, r) in std::mem::take(&mut st.inbox[i]) {
            if r == 0 {
                st.rib_in[i].remove(&from);
            } else {
                st.rib_in[i].insert(from, r);
            }
        }
        let pick = select(
            st.rib_in[i].iter().map(|(&from, &r)| (t.id(from), r)),
            g.tiebreak(),
            g.cost(),
        );
        let best = match pick {
            Some((from, reward)) => {
                let from_i = t.idx(from)?;
                let mut route = vec![t.id(i)];
                route.extend(st.route(t, from_i));
                Some(RewardOffer {
                    from,
                    to: t.id(i),
                    reward,
                    route,
                })
            }
            None => None,
        };
        if best.as_ref().map(|o| (o.from, o.reward))
            != st.best[i].as_ref().map(|o| (o.from, o.reward))
        {
            changed = true;
        }
        st.best[i] = best;
    }

    let mut outgoing = Vec::new();
    for &i in &ids {
        let arity = lay.children[i].len();
        if arity == 0 {
            continue;
        }
        let action = match &st.best[i] {
            Some(o) => {
                let h = st.snapshot(t, lay.stage[i]);
                let a = s.action(&View {
                    player: t.id(i),
                    stage: lay.stage[i],
                    incoming: o.reward,
                    arity,
                    history: &h,
                })?;
                check_action(t.id(i), o.reward, arity, &a)?;
                a
            }
            None => vec![0; arity],
        };
        let unchanged = match &st.emitted[i] {
            Some(prev) => *prev == action,
            None => action.iter().all(|&y| y == 0),
        };
        if !unchanged {
            changed = true;
            for (&j, &y) in lay.children[i].iter().zip(&action) {
                outgoing.push((j, i, y));
            }
            st.emitted[i] = Some(action);
        }
    }
    for (j, i, y) in outgoing {
        st.inbox[j].push((i, y));
    }
    st.round += 1;
    Ok(changed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: OutcomeTree,
    pub converged: bool,
    pub rounds: usize,
}

/// Steps until a full fairness window passes with no change and no message
/// in flight, or until `max_rounds`.
pub fn run<S: Strategy + ?Sized>(
    g: &GameSpec,
    s: &S,
    sched: &Schedule,
    max_rounds: usize,
) -> Result<RunReport> {
    let mut st = ProtocolState::new(g);
    let mut quiet = 0;
    let mut converged = false;
    while st.round < max_rounds {
        let activated = sched.round(st.round).clone();
        if step(g, s, &mut st, &activated)? {
            quiet = 0;
        } else {
            quiet += 1;
        }
        if quiet >= sched.window() && st.quiescent() {
            converged = true;
            break;
        }
    }
    Ok(RunReport {
        outcome: st.outcome(g),
        converged,
        rounds: st.round,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub schedule: Schedule,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceCheck {
    /// The fixed-schedule cascade outcome every run is compared with.
    pub reference: OutcomeTree,
    pub trials: usize,
    /// Every trial converged.
    pub converged: bool,
    /// Every trial ended at the reference tree.
    pub unanimous: bool,
    pub max_rounds_used: usize,
    pub counterexample: Option<Counterexample>,
}

/// Runs `trials` random fair schedules (seeds `seed..seed + trials`) and
/// compares each outcome with the cascade.
pub fn check_unique_convergence<S: Strategy + Sync + ?Sized>(
    g: &GameSpec,
    s: &S,
    trials: usize,
    seed: u64,
) -> Result<ConvergenceCheck> {
    let t = g.topology();
    let reference = play_strategy(g, s)?;
    let windows = t.depth() + 2;
    let reports: Vec<(Schedule, RunReport)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let sched = Schedule::random(t, seed.wrapping_add(trial as u64), windows);
            let max_rounds = (t.depth() + 1) * sched.window();
            run(g, s, &sched, max_rounds).map(|r| (sched, r))
        })
        .collect::<Result<_>>()?;
    let converged = reports.iter().all(|(_, r)| r.converged);
    let unanimous = reports.iter().all(|(_, r)| r.outcome == reference);
    let max_rounds_used = reports.iter().map(|(_, r)| r.rounds).max().unwrap_or(0);
    let counterexample = reports
        .into_iter()
        .enumerate()
        .find(|(_, (_, r))| !r.converged || r.outcome != reference)
        .map(|(trial, (schedule, report))| Counterexample {
            trial,
            schedule,
            report,
        });
    Ok(ConvergenceCheck {
        reference,
        trials,
        converged,
        unanimous,
        max_rounds_used,
        counterexample,
    })
}

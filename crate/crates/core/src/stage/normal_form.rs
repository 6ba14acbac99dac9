//! Two-player normal form of the 3-stage ring's first stage.
//!
//! Stages 2 and 3 are resolved first, leaving the two stage-1 players to pick
//! rewards simultaneously with payoffs `(r_d - r_i) * δ_i`.

use serde::{Deserialize, Serialize};

use super::{ActionProfile, ActionSpace, History};
use crate::error::{Error, Result};
use crate::game::{select, GameSpec};
use crate::play::play;
use crate::topology::{NodeId, Shape};
use crate::Reward;

/// How the stage-2 Bertrand competition is resolved for each stage-1 cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage2Resolution {
    /// Exhaustive pure-equilibrium search of the stage-2 game. Among several
    /// equilibria the one where the player with the higher parental reward
    /// (ties by the bottom player's rule) wins with its lowest winning bid
    /// while the loser bids its cap.
    #[default]
    Searched,
    /// Closed-form rule: `0` when the parent offered at most 1, `1` when the
    /// rival's parent offered at most 1, otherwise `min(r_own - 1, r_rival - 1)`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormMatrix {
    /// Row player's actions (left stage-1 player).
    pub rows: Vec<Reward>,
    /// Column player's actions (right stage-1 player).
    pub cols: Vec<Reward>,
    /// `payoffs[r][c] = (u_row, u_col)`.
    pub payoffs: Vec<Vec<(i64, i64)>>,
    pub note: String,
}

impl NormalFormMatrix {
    pub fn new(
        rows: Vec<Reward>,
        cols: Vec<Reward>,
        payoffs: Vec<Vec<(i64, i64)>>,
    ) -> Result<Self> {
        if payoffs.len() != rows.len() || payoffs.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Invalid(
                "payoff table does not match action sets".into(),
            ));
        }
        Ok(NormalFormMatrix {
            rows,
            cols,
            payoffs,
            note: String::new(),
        })
    }

    pub fn payoff(&self, row: Reward, col: Reward) -> Option<(i64, i64)> {
        let r = self.rows.iter().position(|&x| x == row)?;
        let c = self.cols.iter().position(|&x| x == col)?;
        Some(self.payoffs[r][c])
    }

    fn restrict(&self, rows: &[usize], cols: &[usize]) -> NormalFormMatrix {
        NormalFormMatrix {
            rows: rows.iter().map(|&r| self.rows[r]).collect(),
            cols: cols.iter().map(|&c| self.cols[c]).collect(),
            payoffs: rows
                .iter()
                .map(|&r| cols.iter().map(|&c| self.payoffs[r][c]).collect())
                .collect(),
            note: self.note.clone(),
        }
    }

    /// CSV with one line per row action: `r1\r2,<cols...>` then cells `u1;u2`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["r1\\r2".to_string()];
        header.extend(self.cols.iter().map(ToString::to_string));
        w.write_record(&header).expect("in-memory write");
        for (r, row) in self.rows.iter().zip(&self.payoffs) {
            let mut rec = vec![r.to_string()];
            rec.extend(row.iter().map(|(a, b)| format!("{a};{b}")));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Row,
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Elimination {
    pub side: Side,
    pub action: Reward,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EliminationOrder {
    /// Remove one dominated row, then one dominated column, and repeat.
    #[default]
    Alternating,
    /// Exhaust dominated columns before looking at rows again.
    ColumnsFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dominance {
    pub reduced: NormalFormMatrix,
    pub eliminated: Vec<Elimination>,
}

pub fn iterated_strict_dominance(m: &NormalFormMatrix) -> Dominance {
    iterated_strict_dominance_with(m, EliminationOrder::Alternating)
}

pub fn iterated_strict_dominance_with(m: &NormalFormMatrix, order: EliminationOrder) -> Dominance {
    let mut rows: Vec<usize> = (0..m.rows.len()).collect();
    let mut cols: Vec<usize> = (0..m.cols.len()).collect();
    let mut eliminated = Vec::new();

    let dominated_row = |rows: &[usize], cols: &[usize]| {
        rows.iter().copied().find(|&r| {
            rows.iter()
                .any(|&o| o != r && cols.iter().all(|&c| m.payoffs[o][c].0 > m.payoffs[r][c].0))
        })
    };
    let dominated_col = |rows: &[usize], cols: &[usize]| {
        cols.iter().copied().find(|&c| {
            cols.iter()
                .any(|&o| o != c && rows.iter().all(|&r| m.payoffs[r][o].1 > m.payoffs[r][c].1))
        })
    };

    loop {
        let mut changed = false;
        if order == EliminationOrder::ColumnsFirst {
            while let Some(c) = dominated_col(&rows, &cols) {
                cols.retain(|&x| x != c);
                eliminated.push(Elimination {
                    side: Side::Col,
                    action: m.cols[c],
                });
                changed = true;
            }
        }
        if let Some(r) = dominated_row(&rows, &cols) {
            rows.retain(|&x| x != r);
            eliminated.push(Elimination {
                side: Side::Row,
                action: m.rows[r],
            });
            changed = true;
        }
        if let Some(c) = dominated_col(&rows, &cols) {
            cols.retain(|&x| x != c);
            eliminated.push(Elimination {
                side: Side::Col,
                action: m.cols[c],
            });
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Dominance {
        reduced: m.restrict(&rows, &cols),
        eliminated,
    }
}

/// Cells `(row action, col action)` where neither player gains strictly by
/// moving alone.
pub fn pure_nash(m: &NormalFormMatrix) -> Vec<(Reward, Reward)> {
    let mut out = Vec::new();
    for (r, row) in m.payoffs.iter().enumerate() {
        for (c, &(u1, u2)) in row.iter().enumerate() {
            let row_ok = m.payoffs.iter().all(|other| other[c].0 <= u1);
            let col_ok = row.iter().all(|other| other.1 <= u2);
            if row_ok && col_ok {
                out.push((m.rows[r], m.cols[c]));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponseWalk {
    /// Cells visited, starting cell first.
    pub path: Vec<(Reward, Reward)>,
    /// The recurring part of the walk; a single cell for a fixed point.
    pub cycle: Vec<(Reward, Reward)>,
    pub fixed_point: bool,
}

/// Alternating best-response walk, column player first; ties go to the
/// lowest action.
pub fn best_response_cycle(
    m: &NormalFormMatrix,
    start: (Reward, Reward),
) -> Result<BestResponseWalk> {
    let mut r = m
        .rows
        .iter()
        .position(|&x| x == start.0)
        .ok_or_else(|| Error::Invalid(format!("row action {} not in matrix", start.0)))?;
    let mut c = m
        .cols
        .iter()
        .position(|&x| x == start.1)
        .ok_or_else(|| Error::Invalid(format!("column action {} not in matrix", start.1)))?;

    let best_col = |r: usize| {
        (0..m.cols.len())
            .max_by(|&a, &b| m.payoffs[r][a].1.cmp(&m.payoffs[r][b].1).then(b.cmp(&a)))
            .expect("non-empty")
    };
    let best_row = |c: usize| {
        (0..m.rows.len())
            .max_by(|&a, &b| m.payoffs[a][c].0.cmp(&m.payoffs[b][c].0).then(b.cmp(&a)))
            .expect("non-empty")
    };
    let col_ok = |r: usize, c: usize| m.payoffs[r][c].1 >= m.payoffs[r][best_col(r)].1;
    let row_ok = |r: usize, c: usize| m.payoffs[r][c].0 >= m.payoffs[best_row(c)][c].0;
    let cell = |(r, c): (usize, usize)| (m.rows[r], m.cols[c]);
    let dedup = |states: &[((usize, usize), bool)]| {
        let mut out: Vec<(Reward, Reward)> = Vec::new();
        for &(rc, _) in states {
            if out.last() != Some(&cell(rc)) {
                out.push(cell(rc));
            }
        }
        out
    };

    let mut states: Vec<((usize, usize), bool)> = Vec::new();
    let mut col_turn = true;
    loop {
        if col_ok(r, c) && row_ok(r, c) {
            states.push(((r, c), col_turn));
            return Ok(BestResponseWalk {
                path: dedup(&states),
                cycle: vec![cell((r, c))],
                fixed_point: true,
            });
        }
        if let Some(pos) = states.iter().position(|&s| s == ((r, c), col_turn)) {
            let mut cycle = dedup(&states[pos..]);
            if cycle.len() > 1 && cycle.first() == cycle.last() {
                cycle.pop();
            }
            return Ok(BestResponseWalk {
                path: dedup(&states),
                cycle,
                fixed_point: false,
            });
        }
        states.push(((r, c), col_turn));
        if col_turn {
            if !col_ok(r, c) {
                c = best_col(r);
            }
        } else if !row_ok(r, c) {
            r = best_row(c);
        }
        col_turn = !col_turn;
    }
}

/// Builds the stage-1 payoff matrix of the 3-stage ring at `g.reward()`.
pub fn reduce_to_normal_form(
    g: &GameSpec,
    resolution: Stage2Resolution,
) -> Result<NormalFormMatrix> {
    let t = g.topology();
    t.require_shape(Shape::Ring)?;
    if t.depth() != 3 {
        return Err(Error::Invalid(format!(
            "expected a 3-stage ring, found {} stages",
            t.depth()
        )));
    }
    let rd = g.reward();
    if rd < 1 {
        return Err(Error::Invalid("the ring matrix needs r_d >= 1".into()));
    }
    let ring = RingK3::new(g)?;
    let actions: Vec<Reward> = (0..rd).collect();
    let mut payoffs = Vec::with_capacity(actions.len());
    for &r1 in &actions {
        let mut row = Vec::with_capacity(actions.len());
        for &r2 in &actions {
            let (r3, r4) = match resolution {
                Stage2Resolution::Searched => ring.searched(r1, r2)?,
                Stage2Resolution::Literal => (literal(r1, r2), literal(r2, r1)),
            };
            let a = ring.profile(r1, r2, r3, r4);
            let p = play(g, &a, &History::root(g), None)?;
            let (i1, i2) = (t.idx(ring.left)?, t.idx(ring.right)?);
            row.push((p.utility(g, i1).profit, p.utility(g, i2).profit));
        }
        payoffs.push(row);
    }
    let mut m = NormalFormMatrix::new(actions.clone(), actions, payoffs)?;
    m.note = match resolution {
        Stage2Resolution::Searched => {
            "stage 2 by exhaustive pure-equilibrium search; winner bids lowest winning reward, loser bids its cap"
        }
        Stage2Resolution::Literal => "stage 2 by the closed-form Bertrand rule",
    }
    .to_string();
    Ok(m)
}

fn literal(own: Reward, rival: Reward) -> Reward {
    if own <= 1 {
        0
    } else if rival > 1 {
        (own - 1).min(rival - 1)
    } else {
        1
    }
}

struct RingK3<'g> {
    g: &'g GameSpec,
    left: NodeId,
    right: NodeId,
    left_child: NodeId,
    right_child: NodeId,
}

impl<'g> RingK3<'g> {
    fn new(g: &'g GameSpec) -> Result<Self> {
        let t = g.topology();
        let top = t.stage_players(1);
        let [left, right] = top[..] else {
            return Err(Error::Invalid("ring must have two stage-1 players".into()));
        };
        let left_child = t.candidates(left)?[0];
        let right_child = t.candidates(right)?[0];
        Ok(RingK3 {
            g,
            left,
            right,
            left_child,
            right_child,
        })
    }

    fn profile(&self, r1: Reward, r2: Reward, r3: Reward, r4: Reward) -> ActionProfile {
        let mut a = ActionProfile::new();
        a.set(self.left, vec![r1])
            .set(self.right, vec![r2])
            .set(self.left_child, vec![r3])
            .set(self.right_child, vec![r4]);
        a
    }

    /// Which stage-2 player the bottom player sides with given these bids.
    fn bottom_parent(&self, r3: Reward, r4: Reward) -> Option<NodeId> {
        select(
            [(self.left_child, r3), (self.right_child, r4)],
            self.g.tiebreak(),
            self.g.cost(),
        )
        .map(|(p, _)| p)
    }

    fn searched(&self, r1: Reward, r2: Reward) -> Result<(Reward, Reward)> {
        let cap1 = r1.saturating_sub(1);
        let cap2 = r2.saturating_sub(1);
        // Stage-2 profit: (parental reward - bid) when the bottom player buys.
        let pay = |r3: Reward, r4: Reward| match self.bottom_parent(r3, r4) {
            Some(p) if p == self.left_child => ((r1 - r3) as i64, 0),
            Some(_) => (0, (r2 - r4) as i64),
            None => (0, 0),
        };
        let mut equilibria = Vec::new();
        for r3 in ActionSpace::new(r1, 1).map(|v| v[0]) {
            for r4 in ActionSpace::new(r2, 1).map(|v| v[0]) {
                let (u3, u4) = pay(r3, r4);
                let stable3 = (0..=cap1).all(|x| pay(x, r4).0 <= u3);
                let stable4 = (0..=cap2).all(|x| pay(r3, x).1 <= u4);
                if stable3 && stable4 {
                    equilibria.push((r3, r4));
                }
            }
        }
        if equilibria.is_empty() {
            return Err(Error::NoContinuation { stage: 2 });
        }
        let winner = match r1.cmp(&r2) {
            std::cmp::Ordering::Greater => self.left_child,
            std::cmp::Ordering::Less => self.right_child,
            std::cmp::Ordering::Equal => self.bottom_parent(1, 1).expect("tie resolves"),
        };
        let preferred = equilibria
            .iter()
            .filter(|&&(r3, r4)| self.bottom_parent(r3, r4) == Some(winner))
            .filter(|&&(r3, r4)| {
                if winner == self.left_child {
                    r4 == cap2
                } else {
                    r3 == cap1
                }
            })
            .min_by_key(|&&(r3, r4)| if winner == self.left_child { r3 } else { r4 });
        Ok(*preferred.unwrap_or(&equilibria[0]))
    }
}

use crate::error::Result;
use crate::game::GameSpec;
use crate::play::{play, Override, RouteChoice};
use crate::stage::{ActionProfile, ActionSpace, ClippedActions, History};
use crate::topology::NodeId;
use crate::Reward;

/// A response through a lower-reward route that beats every response
/// through a highest-reward route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HrpViolation {
    pub player: NodeId,
    pub history: History,
    pub highest: (NodeId, Reward),
    pub highest_utility: i64,
    pub lower: (NodeId, Reward),
    pub lower_action: Vec<Reward>,
    pub lower_utility: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HrpAudit {
    /// Responses (route and action pairs) evaluated.
    pub responses: usize,
    pub violation: Option<HrpViolation>,
}

/// Exhaustive best-response search for every player against fixed actions of
/// the others (capped below what each receives).
///
/// Every acceptable route and every action on it is tried. The audit fails if
/// some strictly lower-reward route yields strictly more than the best
/// response on a highest-reward route, or if declining beats the latter.
pub fn hrp_audit(g: &GameSpec, others: &ActionProfile) -> Result<HrpAudit> {
    let t = g.topology();
    let lay = t.layout();
    let s = ClippedActions(others.clone());
    let base = play(g, &s, &History::root(g), None)?;
    let mut audit = HrpAudit::default();
    for k in 1..=lay.depth {
        let h = base.history_at(k);
        for &i in &lay.by_stage[k] {
            let offers: Vec<(NodeId, Reward)> = lay.incoming[k]
                .iter()
                .zip(h.offers())
                .filter(|((_, r), &x)| *r == i && x >= g.cost())
                .map(|(&(sender, _), &x)| (t.id(sender), x))
                .collect();
            let Some(top) = offers.iter().map(|&(_, x)| x).max() else {
                continue;
            };
            let arity = lay.children[i].len();
            let mut best_high = i64::MIN;
            let mut best_high_route = offers[0];
            let mut best_low: Option<(i64, (NodeId, Reward), Vec<Reward>)> = None;
            for &(via, x) in &offers {
                for action in ActionSpace::new(x, arity) {
                    let dev = Override {
                        player: i,
                        route: RouteChoice::Via(via),
                        action: &action,
                    };
                    let u = play(g, &s, h, Some(&dev))?.utility(g, i).total();
                    audit.responses += 1;
                    if x == top {
                        if u > best_high {
                            best_high = u;
                            best_high_route = (via, x);
                        }
                    } else if best_low.as_ref().is_none_or(|(b, _, _)| u > *b) {
                        best_low = Some((u, (via, x), action));
                    }
                }
            }
            let violation = match best_low {
                Some((u, route, action)) if u > best_high => Some((u, route, action)),
                // Declining is the zero-utility response without a route.
                _ if best_high < 0 => Some((0, (t.destination(), 0), Vec::new())),
                _ => None,
            };
            if let Some((u, lower, lower_action)) = violation {
                audit.violation = Some(HrpViolation {
                    player: t.id(i),
                    history: h.clone(),
                    highest: best_high_route,
                    highest_utility: best_high,
                    lower,
                    lower_action,
                    lower_utility: u,
                });
                return Ok(audit);
            }
        }
    }
    Ok(audit)
}

//! Equilibrium constructions, the incentive-growth function and the
//! brute-force searches that check them.

mod construct;
mod growth;
mod hrp;
mod oracle;

pub use construct::{
    build_line_spe, build_ring2_ne, build_ring_special, build_tree_spe, line_reach, on_path_offers,
    ring_special_profile,
};
pub use growth::{growth_f, growth_reward, growth_sequence, GrowthRow, GrowthTable};
pub use hrp::{hrp_audit, HrpAudit, HrpViolation};
pub use oracle::{
    min_spanning_incentive, min_spanning_incentive_with, ContinuationSelector, SpanningEquilibrium,
};

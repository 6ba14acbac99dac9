//! A reseller that refuses a profitable sale is caught by the subgame check.

use std::collections::BTreeMap;

use route_incentives::equilibria::build_line_spe;
use route_incentives::{is_nash, is_subgame_perfect, GameSpec, History, NodeId, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GameSpec::new(Topology::line(3)?, 3);
    let mut s = build_line_spe(3, 3)?;
    let mut p2 = s.get(NodeId(2)).cloned().unwrap_or_default();
    p2.table = BTreeMap::from([(0, vec![0]), (1, vec![0]), (2, vec![0]), (3, vec![1])]);
    s.insert(NodeId(2), p2);

    println!(
        "nash at the root: {}",
        is_nash(&g, &s, &History::root(&g))?.holds()
    );
    if let Some(w) = is_subgame_perfect(&g, &s)?.witness() {
        println!(
            "player {} at offers {:?}: plays {:?}, {:?} gains {}",
            w.player,
            w.history.offers(),
            w.on_path,
            w.alternative,
            w.gain()
        );
    }
    Ok(())
}

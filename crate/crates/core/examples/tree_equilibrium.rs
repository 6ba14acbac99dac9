//! Subgame-perfect profile on a binary tree, rendered as DOT.

use route_incentives::equilibria::build_tree_spe;
use route_incentives::{is_subgame_perfect, play_strategy, GameSpec, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Topology::complete_tree(2, 3)?;
    let g = GameSpec::new(t.clone(), 3);
    let s = build_tree_spe(3, &t)?;
    eprintln!("subgame perfect: {}", is_subgame_perfect(&g, &s)?.holds());
    print!("{}", play_strategy(&g, &s)?.to_dot());
    Ok(())
}

//! Build the subgame-perfect profile on a line and check it.

use route_incentives::equilibria::{build_line_spe, on_path_offers};
use route_incentives::{is_subgame_perfect, play_strategy, GameSpec, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (rd, k) in [(3, 3), (5, 4), (4, 4), (11, 5)] {
        let g = GameSpec::new(Topology::line(k)?, rd);
        let s = build_line_spe(rd, k)?;
        let o = play_strategy(&g, &s)?;
        let bids: Vec<_> = on_path_offers(&g, &s)?
            .into_values()
            .map(|a| a[0])
            .collect();
        println!(
            "K={k} r_d={rd}: offers {bids:?}, {} of {k} reached, subgame perfect: {}",
            o.participant_count(),
            is_subgame_perfect(&g, &s)?.holds()
        );
    }
    Ok(())
}

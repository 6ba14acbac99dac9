//! The spanning equilibrium of the K-stage ring at r_d = f(K).

use route_incentives::equilibria::{build_ring_special, on_path_offers};
use route_incentives::{is_nash, play_strategy, GameSpec, History, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in 3..=7 {
        let (rd, s) = build_ring_special(k)?;
        let g = GameSpec::new(Topology::ring(k)?, rd.clone().try_into()?);
        let o = play_strategy(&g, &s)?;
        let bids: Vec<_> = on_path_offers(&g, &s)?
            .into_values()
            .map(|a| a[0])
            .collect();
        let profits: Vec<_> = o.players().map(|(_, p)| p.utility.profit).collect();
        println!("K={k} r_d={rd} offers {bids:?}");
        println!("    profit terms {profits:?}");
        println!(
            "    spanning {} nash {}",
            o.is_spanning(),
            is_nash(&g, &s, &History::root(&g))?.holds()
        );
    }
    Ok(())
}

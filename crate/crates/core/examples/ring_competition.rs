//! Two resellers competing for one buyer undercut each other down to `r_d - 1`.

use route_incentives::equilibria::{build_ring2_ne, on_path_offers};
use route_incentives::{is_nash, GameSpec, History, TieBreak, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for rd in 1..=6 {
        let s = build_ring2_ne(rd)?;
        for tb in [TieBreak::LowestId, TieBreak::HighestId] {
            let g = GameSpec::new(Topology::ring(2)?, rd).with_tiebreak(tb);
            let bids = on_path_offers(&g, &s)?;
            let nash = is_nash(&g, &s, &History::root(&g))?.holds();
            println!("r_d={rd} {tb:?}: {bids:?} nash={nash}");
        }
    }
    Ok(())
}

//! Random fair schedules all settle on the tree predicted by the staged game.

use route_incentives::dynamics::{check_unique_convergence, run, Schedule};
use route_incentives::equilibria::{build_ring_special, build_tree_spe};
use route_incentives::{GameSpec, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Topology::complete_tree(2, 3)?;
    let g = GameSpec::new(t.clone(), 4);
    let s = build_tree_spe(4, &t)?;
    let one = run(&g, &s, &Schedule::random(&t, 1, 5), 200)?;
    println!(
        "one run: converged={} after {} rounds",
        one.converged, one.rounds
    );

    let c = check_unique_convergence(&g, &s, 100, 0)?;
    println!("tree: {} trials, unanimous={}", c.trials, c.unanimous);

    let (rd, s) = build_ring_special(4)?;
    let g = GameSpec::new(Topology::ring(4)?, rd.try_into()?);
    let c = check_unique_convergence(&g, &s, 100, 0)?;
    println!(
        "ring: {} trials, unanimous={}, at most {} rounds",
        c.trials, c.unanimous, c.max_rounds_used
    );
    Ok(())
}

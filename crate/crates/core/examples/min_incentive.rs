//! Exhaustive search for the least reward that reaches every player.

use route_incentives::equilibria::{growth_f, min_spanning_incentive};
use route_incentives::Topology;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("line", 1, Topology::line(1)?),
        ("line", 2, Topology::line(2)?),
        ("line", 3, Topology::line(3)?),
        ("line", 4, Topology::line(4)?),
        ("line", 5, Topology::line(5)?),
        ("ring", 3, Topology::ring(3)?),
        ("ring", 4, Topology::ring(4)?),
    ];
    for (name, k, t) in cases {
        let found = min_spanning_incentive(&t, 20)?;
        let rd = found.as_ref().map(|e| e.rd);
        println!("{name} K={k}: search {rd:?}, f(K) = {}", growth_f(k));
    }
    // A complete binary tree of depth 2 needs far less than a line of 6.
    let e = min_spanning_incentive(&Topology::complete_tree(2, 2)?, 20)?;
    println!("binary tree depth 2: {:?}", e.map(|e| e.rd));
    Ok(())
}

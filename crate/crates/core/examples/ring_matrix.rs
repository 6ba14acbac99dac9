//! The 3-stage ring has no pure equilibrium once r_d exceeds 5.

use route_incentives::stage::{
    best_response_cycle, iterated_strict_dominance, pure_nash, reduce_to_normal_form,
    Stage2Resolution,
};
use route_incentives::{GameSpec, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ring = Topology::ring(3)?;
    for rd in 1..=12 {
        let m =
            reduce_to_normal_form(&GameSpec::new(ring.clone(), rd), Stage2Resolution::Searched)?;
        println!("r_d={rd:>2} pure equilibria: {:?}", pure_nash(&m));
    }

    let m = reduce_to_normal_form(&GameSpec::new(ring, 6), Stage2Resolution::Searched)?;
    print!("\n{}", m.to_csv());
    let d = iterated_strict_dominance(&m);
    println!(
        "survivors: rows {:?} cols {:?}",
        d.reduced.rows, d.reduced.cols
    );
    let walk = best_response_cycle(&m, (2, 1))?;
    println!("best responses from (2, 1) cycle through {:?}", walk.cycle);
    Ok(())
}

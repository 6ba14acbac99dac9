//! Against any fixed actions, following the highest offered reward is a best response.

use route_incentives::equilibria::hrp_audit;
use route_incentives::{ActionProfile, GameSpec, NodeId, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Topology::new(
        NodeId(0),
        (0..5).map(NodeId),
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)].map(|(a, b)| (NodeId(a), NodeId(b))),
    )?;
    let g = GameSpec::new(t, 6);
    let mut responses = 0;
    for a1 in 0..6 {
        for a2 in 0..6 {
            for a3 in 0..6 {
                let others = ActionProfile::new()
                    .with(1, vec![a1])
                    .with(2, vec![a2])
                    .with(3, vec![a3]);
                let audit = hrp_audit(&g, &others)?;
                responses += audit.responses;
                if let Some(v) = audit.violation {
                    println!("violation: {v:?}");
                    return Ok(());
                }
            }
        }
    }
    println!("{responses} responses checked, none beats the highest-reward route");
    Ok(())
}

//! Read a topology from JSON, classify it and export an outcome as DOT.

use route_incentives::{
    outcome_from_actions, stages, validate_topology, ActionProfile, GameSpec, Topology,
};

const DIAMOND: &str = r#"{
  "nodes": [0, 1, 2, 3, 4],
  "destination": 0,
  "edges": [[0, 1], [0, 2], [1, 3], [2, 3], [3, 4]]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Topology::from_json(DIAMOND)?;
    let info = validate_topology(&t);
    println!("shape {:?}, depth {}", info.shape, info.depth);
    println!("stages {:?}", stages(&t));

    let g = GameSpec::new(t, 6);
    let a = ActionProfile::new()
        .with(1, vec![3])
        .with(2, vec![4])
        .with(3, vec![2]);
    let o = outcome_from_actions(&g, &a)?;
    print!("{}", o.to_dot());
    println!("{}", serde_json::to_string_pretty(&o.to_json_value())?);
    Ok(())
}

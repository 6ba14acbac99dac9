//! Print the incentive-growth function next to its factorial differences.

use route_incentives::equilibria::GrowthTable;

fn main() {
    let max_k = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(12);
    print!("{}", GrowthTable::new(max_k).to_csv());
}

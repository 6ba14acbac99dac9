use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Reward;

/// Minimum reward that makes a depth-`k` line (or ring) span in equilibrium:
/// `f(0)=0, f(1)=1, f(2)=2, f(k) = (k-1) f(k-1) - (k-2) f(k-2)`.
pub fn growth_f(k: usize) -> BigUint {
    growth_sequence(k).pop().expect("non-empty")
}

/// `f(0..=k)`.
pub fn growth_sequence(k: usize) -> Vec<BigUint> {
    let mut f: Vec<BigUint> = vec![BigUint::zero(), BigUint::one(), BigUint::from(2u32)];
    for i in 3..=k {
        // f is increasing, so the subtraction never underflows.
        let next = &f[i - 1] * BigUint::from(i - 1) - &f[i - 2] * BigUint::from(i - 2);
        f.push(next);
    }
    f.truncate(k + 1);
    f
}

/// `f(k)` as a native reward, for constructing profiles.
pub fn growth_reward(k: usize) -> Result<Reward> {
    let f = growth_f(k);
    f.to_u64()
        .ok_or_else(|| Error::RewardOverflow(f.to_string()))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRow {
    pub k: usize,
    pub f: BigUint,
    /// `f(k) - f(k-1)`, from `k = 1`.
    pub diff: Option<BigUint>,
    /// `(k-2)!`, from `k = 2`.
    pub factorial: Option<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    pub fn new(max_k: usize) -> GrowthTable {
        let f = growth_sequence(max_k);
        let rows = (0..=max_k)
            .map(|k| GrowthRow {
                k,
                f: f[k].clone(),
                diff: (k >= 1).then(|| &f[k] - &f[k - 1]),
                factorial: (k >= 2).then(|| factorial(k - 2)),
            })
            .collect();
        GrowthTable { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "f", "f_diff", "factorial_k_minus_2"])
            .expect("in-memory write");
        let show = |v: &Option<BigUint>| v.as_ref().map(ToString::to_string).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.f.to_string(),
                show(&r.diff),
                show(&r.factorial),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let show = |v: &Option<BigUint>| v.as_ref().map(ToString::to_string);
        serde_json::Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "k": r.k.to_string(),
                        "f": r.f.to_string(),
                        "f_diff": show(&r.diff),
                        "factorial_k_minus_2": show(&r.factorial),
                    })
                })
                .collect(),
        )
    }
}

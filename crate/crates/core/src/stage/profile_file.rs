use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PlayerStrategy, StrategyProfile};
use crate::error::{Error, Result};
use crate::game::{GameSpec, TieBreak};
use crate::topology::{NodeId, Topology, TopologyFile};
use crate::Reward;

/// A game together with a strategy profile, as stored on disk.
///
/// Rewards are decimal strings so large values survive any JSON reader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub topology: TopologyFile,
    pub rd: String,
    #[serde(default)]
    pub tiebreak: TieBreak,
    pub players: Vec<PlayerEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerEntry {
    pub id: NodeId,
    pub candidates: Vec<NodeId>,
    /// Incoming reward to offered rewards, one per candidate.
    pub table: BTreeMap<String, Vec<String>>,
}

fn parse_reward(s: &str) -> Result<Reward> {
    s.trim().parse::<Reward>().map_err(|_| {
        if !s.is_empty() && s.trim().bytes().all(|b| b.is_ascii_digit()) {
            Error::RewardOverflow(s.to_string())
        } else {
            Error::Invalid(format!("`{s}` is not a non-negative integer reward"))
        }
    })
}

impl ProfileFile {
    pub fn from_parts(g: &GameSpec, s: &StrategyProfile) -> ProfileFile {
        let players = s
            .players()
            .map(|(&id, ps)| PlayerEntry {
                id,
                candidates: ps.candidates.clone(),
                table: ps
                    .table
                    .iter()
                    .map(|(x, a)| (x.to_string(), a.iter().map(ToString::to_string).collect()))
                    .collect(),
            })
            .collect();
        ProfileFile {
            topology: g.topology().to_file(),
            rd: g.reward().to_string(),
            tiebreak: g.tiebreak(),
            players,
        }
    }

    /// Rebuilds the game and profile, validating the profile against it.
    pub fn into_parts(&self) -> Result<(GameSpec, StrategyProfile)> {
        let t = Topology::from_file(&self.topology)?;
        let g = GameSpec::new(t, parse_reward(&self.rd)?).with_tiebreak(self.tiebreak);
        let mut s = StrategyProfile::new();
        for p in &self.players {
            let mut table = BTreeMap::new();
            for (x, a) in &p.table {
                let a = a
                    .iter()
                    .map(|y| parse_reward(y))
                    .collect::<Result<Vec<_>>>()?;
                table.insert(parse_reward(x)?, a);
            }
            s.insert(
                p.id,
                PlayerStrategy {
                    candidates: p.candidates.clone(),
                    table,
                },
            );
        }
        s.validate(&g)?;
        Ok((g, s))
    }

    pub fn from_json(text: &str) -> Result<ProfileFile> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("profile file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

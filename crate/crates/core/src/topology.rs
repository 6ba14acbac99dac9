//! Undirected topologies with a distinguished destination, and the stage
//! layout induced by hop distance from that destination.
//!
//! Players are addressed by [`NodeId`] at the API boundary. Internally every
//! node gets a dense index in `0..=n` with the destination at index `0`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Wire format for topologies: `{"nodes": [...], "destination": d, "edges": [[a, b], ...]}`.
///
/// `nodes` may or may not list the destination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyFile {
    pub nodes: Vec<NodeId>,
    pub destination: NodeId,
    pub edges: Vec<[NodeId; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Line,
    Tree,
    Ring,
    General,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Line => "line",
            Shape::Tree => "tree",
            Shape::Ring => "ring",
            Shape::General => "general",
        }
    }

    /// A line is also a tree.
    pub fn satisfies(self, wanted: Shape) -> bool {
        self == wanted || (self == Shape::Line && wanted == Shape::Tree)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of [`validate_topology`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeInfo {
    pub shape: Shape,
    /// Number of stages, i.e. the largest hop distance from the destination.
    pub depth: usize,
    pub stages: BTreeMap<NodeId, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    destination: NodeId,
    /// Dense index -> id; index 0 is the destination, players follow in id order.
    ids: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    adjacency: Vec<BTreeSet<usize>>,
    layout: Layout,
    shape: Shape,
}

/// Stage structure of a connected topology.
///
/// Candidate neighbors of a player are its neighbors one stage further from
/// the destination; parents are its neighbors one stage closer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub(crate) stage: Vec<usize>,
    pub(crate) parents: Vec<Vec<usize>>,
    pub(crate) children: Vec<Vec<usize>>,
    /// Players of each stage (index 0 holds just the destination).
    pub(crate) by_stage: Vec<Vec<usize>>,
    /// Offer slots into each stage, as `(sender, receiver)` ordered by receiver then sender.
    pub(crate) incoming: Vec<Vec<(usize, usize)>>,
    pub(crate) depth: usize,
}

impl Topology {
    pub fn new(
        destination: NodeId,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut set: BTreeSet<NodeId> = nodes.into_iter().collect();
        set.remove(&destination);
        let mut ids = vec![destination];
        ids.extend(set);
        let index: BTreeMap<NodeId, usize> =
            ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();

        let mut adjacency = vec![BTreeSet::new(); ids.len()];
        let mut edge_count = 0usize;
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) else {
                return Err(Error::UnknownNode(a, b));
            };
            if !adjacency[ia].insert(ib) {
                return Err(Error::DuplicateEdge(a, b));
            }
            adjacency[ib].insert(ia);
            edge_count += 1;
        }
        if ids.len() == 1 || adjacency[0].is_empty() {
            return Err(Error::NoPlayers);
        }

        let layout = Layout::build(&ids, &adjacency)?;
        let shape = classify(&adjacency, edge_count);
        Ok(Topology {
            destination,
            ids,
            index,
            adjacency,
            layout,
            shape,
        })
    }

    pub fn from_file(file: &TopologyFile) -> Result<Self> {
        if !file.nodes.contains(&file.destination)
            && !file.edges.iter().flatten().any(|n| *n == file.destination)
        {
            return Err(Error::MissingDestination(file.destination));
        }
        Topology::new(
            file.destination,
            file.nodes.iter().copied(),
            file.edges.iter().map(|[a, b]| (*a, *b)),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TopologyFile =
            serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Topology::from_file(&file)
    }

    pub fn to_file(&self) -> TopologyFile {
        TopologyFile {
            nodes: self.ids.clone(),
            destination: self.destination,
            edges: self.edges().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("topology serializes")
    }

    /// `d - 1 - 2 - ... - k`, destination `0`.
    pub fn line(k: usize) -> Result<Self> {
        let edges = (0..k as u32).map(|i| (NodeId(i), NodeId(i + 1)));
        Topology::new(NodeId(0), (0..=k as u32).map(NodeId), edges)
    }

    /// Even cycle with `k` stages: destination `0`, players `1..=2k-1`,
    /// where player `i` plays at stage `ceil(i/2)` and `2k-1` sits at the bottom
    /// between its left parent `2k-3` and right parent `2k-2`.
    pub fn ring(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid(format!(
                "a ring needs at least 2 stages, got {k}"
            )));
        }
        let k = k as u32;
        let mut edges = vec![(0, 1), (0, 2)];
        for j in 1..k.saturating_sub(1) {
            edges.push((2 * j - 1, 2 * j + 1));
            edges.push((2 * j, 2 * j + 2));
        }
        edges.push((2 * k - 3, 2 * k - 1));
        edges.push((2 * k - 2, 2 * k - 1));
        Topology::new(
            NodeId(0),
            (0..2 * k).map(NodeId),
            edges.into_iter().map(|(a, b)| (NodeId(a), NodeId(b))),
        )
    }

    /// Destination at the center with `n` leaf players.
    pub fn star(n: usize) -> Result<Self> {
        let edges = (1..=n as u32).map(|i| (NodeId(0), NodeId(i)));
        Topology::new(NodeId(0), (0..=n as u32).map(NodeId), edges)
    }

    /// Complete tree rooted at the destination; players numbered breadth-first from 1.
    pub fn complete_tree(arity: usize, depth: usize) -> Result<Self> {
        let mut edges = Vec::new();
        let mut level = vec![0u32];
        let mut next_id = 1u32;
        for _ in 0..depth {
            let mut next = Vec::new();
            for &p in &level {
                for _ in 0..arity {
                    edges.push((NodeId(p), NodeId(next_id)));
                    next.push(next_id);
                    next_id += 1;
                }
            }
            level = next;
        }
        Topology::new(NodeId(0), (0..next_id).map(NodeId), edges)
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    /// Players in ascending id order (the destination excluded).
    pub fn players(&self) -> &[NodeId] {
        &self.ids[1..]
    }

    pub fn player_count(&self) -> usize {
        self.ids.len() - 1
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn neighbors(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let i = self.idx(id)?;
        Ok(self.adjacency[i].iter().map(|&j| self.ids[j]).collect())
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(move |(i, nbrs)| {
                nbrs.iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (self.ids[i], self.ids[j]))
            })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Number of stages of the fixed-schedule game.
    pub fn depth(&self) -> usize {
        self.layout.depth
    }

    pub fn stage_of(&self, id: NodeId) -> Result<usize> {
        Ok(self.layout.stage[self.idx(id)?])
    }

    /// Neighbors at the next stage, in id order.
    pub fn candidates(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let i = self.idx(id)?;
        Ok(self.layout.children[i]
            .iter()
            .map(|&j| self.ids[j])
            .collect())
    }

    /// Neighbors at the previous stage, in id order.
    pub fn parents(&self, id: NodeId) -> Result<Vec<NodeId>> {
        let i = self.idx(id)?;
        Ok(self.layout.parents[i]
            .iter()
            .map(|&j| self.ids[j])
            .collect())
    }

    pub fn stage_players(&self, stage: usize) -> Vec<NodeId> {
        self.layout
            .by_stage
            .get(stage)
            .map(|v| v.iter().map(|&i| self.ids[i]).collect())
            .unwrap_or_default()
    }

    /// Offer slots `(sender, receiver)` into `stage`; a history at that stage
    /// carries one reward per slot in this order.
    pub fn offer_slots(&self, stage: usize) -> Vec<(NodeId, NodeId)> {
        self.layout
            .incoming
            .get(stage)
            .map(|v| v.iter().map(|&(s, r)| (self.ids[s], self.ids[r])).collect())
            .unwrap_or_default()
    }

    pub fn require_shape(&self, wanted: Shape) -> Result<()> {
        if self.shape.satisfies(wanted) {
            return Ok(());
        }
        if wanted == Shape::Ring && self.is_cycle() {
            return Err(Error::OddRing(self.ids.len()));
        }
        Err(Error::WrongShape {
            expected: wanted.name(),
            found: self.shape.name(),
        })
    }

    fn is_cycle(&self) -> bool {
        self.adjacency.iter().all(|n| n.len() == 2)
    }

    pub(crate) fn idx(&self, id: NodeId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownPlayer(id))
    }

    /// Like [`Topology::idx`] but rejects the destination.
    pub(crate) fn player_idx(&self, id: NodeId) -> Result<usize> {
        match self.idx(id)? {
            0 => Err(Error::UnknownPlayer(id)),
            i => Ok(i),
        }
    }

    pub(crate) fn id(&self, idx: usize) -> NodeId {
        self.ids[idx]
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    pub(crate) fn node_count(&self) -> usize {
        self.ids.len()
    }
}

impl Layout {
    fn build(ids: &[NodeId], adjacency: &[BTreeSet<usize>]) -> Result<Self> {
        let n = ids.len();
        let mut stage = vec![usize::MAX; n];
        stage[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if stage[v] == usize::MAX {
                    stage[v] = stage[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(i) = stage.iter().position(|&s| s == usize::MAX) {
            return Err(Error::Disconnected(ids[i]));
        }
        let depth = *stage.iter().max().unwrap_or(&0);

        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for u in 0..n {
            for &v in &adjacency[u] {
                if stage[v] + 1 == stage[u] {
                    parents[u].push(v);
                } else if stage[v] == stage[u] + 1 {
                    children[u].push(v);
                }
            }
        }
        let mut by_stage = vec![Vec::new(); depth + 1];
        for (u, &s) in stage.iter().enumerate() {
            by_stage[s].push(u);
        }
        let incoming = by_stage
            .iter()
            .map(|players| {
                players
                    .iter()
                    .flat_map(|&r| parents[r].iter().map(move |&s| (s, r)))
                    .collect()
            })
            .collect();
        Ok(Layout {
            stage,
            parents,
            children,
            by_stage,
            incoming,
            depth,
        })
    }
}

fn classify(adjacency: &[BTreeSet<usize>], edge_count: usize) -> Shape {
    let n = adjacency.len();
    if edge_count + 1 == n {
        let path_from_destination =
            adjacency[0].len() == 1 && adjacency.iter().all(|a| a.len() <= 2);
        return if path_from_destination {
            Shape::Line
        } else {
            Shape::Tree
        };
    }
    if edge_count == n && adjacency.iter().all(|a| a.len() == 2) && n.is_multiple_of(2) {
        return Shape::Ring;
    }
    Shape::General
}

/// Classifies `t` and reports its stage depths.
pub fn validate_topology(t: &Topology) -> ShapeInfo {
    let stages = t
        .players()
        .iter()
        .map(|&p| (p, t.layout.stage[t.index[&p]]))
        .collect();
    ShapeInfo {
        shape: t.shape,
        depth: t.depth(),
        stages,
    }
}

/// Map from player to its stage (hop distance from the destination).
pub fn stages(t: &Topology) -> BTreeMap<NodeId, usize> {
    validate_topology(t).stages
}

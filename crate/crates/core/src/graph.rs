//! Undirected simple graphs keyed by externally supplied integer labels.
//!
//! Node labels are never renumbered: every derived value (centralities,
//! digests) is attached to the label, so storage order cannot leak into a
//! fingerprint. Mutations return new graphs and leave the receiver intact.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// External node label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<u64>().map(NodeId)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: malformed line {content:?}: {reason}")]
    MalformedLine {
        line: usize,
        content: String,
        reason: &'static str,
    },
    #[error("{}self-loop on node {node}", line_prefix(*.line))]
    SelfLoop { line: Option<usize>, node: NodeId },
    #[error("{}duplicate edge {u} {v}", line_prefix(*.line))]
    DuplicateEdge { line: Option<usize>, u: NodeId, v: NodeId },
    #[error("no edge between {0} and {1}")]
    MissingEdge(NodeId, NodeId),
    #[error("no such node {0}")]
    MissingNode(NodeId),
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Undirected, unweighted graph without self-loops or multi-edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    edge_count: usize,
}

/// Hop counts from a single source. `None` marks an unreachable node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    pub source: NodeId,
    pub dist: BTreeMap<NodeId, Option<usize>>,
}

impl DistanceMap {
    pub fn get(&self, v: NodeId) -> Option<usize> {
        self.dist.get(&v).copied().flatten()
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from an edge iterator, rejecting self-loops and duplicates.
    pub fn from_edges<I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut g = Graph::new();
        for (u, v) in edges {
            g.insert_edge(NodeId(u), NodeId(v), None)?;
        }
        Ok(g)
    }

    /// Like [`Graph::from_edges`], but `nodes` may also list isolated nodes.
    pub fn from_nodes_and_edges<N, E>(nodes: N, edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator<Item = u64>,
        E: IntoIterator<Item = (u64, u64)>,
    {
        let mut g = Graph::new();
        for v in nodes {
            g.adjacency.entry(NodeId(v)).or_default();
        }
        for (u, v) in edges {
            g.insert_edge(NodeId(u), NodeId(v), None)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Nodes in ascending label order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency.get(&u).is_some_and(|n| n.contains(&v))
    }

    /// Neighbors of `v` in ascending order (empty for unknown nodes).
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&u, ns)| ns.range(u..).map(move |&v| (u, v)))
    }

    /// Declares a node, possibly isolated. No-op when already present.
    pub fn with_node(&self, v: NodeId) -> Graph {
        let mut g = self.clone();
        g.adjacency.entry(v).or_default();
        g
    }

    pub fn add_edge(&self, u: NodeId, v: NodeId) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.insert_edge(u, v, None)?;
        Ok(g)
    }

    /// Removes an edge. Both endpoints stay in the graph even if isolated.
    pub fn remove_edge(&self, u: NodeId, v: NodeId) -> Result<Graph, GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        let mut g = self.clone();
        g.adjacency.get_mut(&u).expect("endpoint").remove(&v);
        g.adjacency.get_mut(&v).expect("endpoint").remove(&u);
        g.edge_count -= 1;
        debug_assert!(g.is_consistent());
        Ok(g)
    }

    pub fn remove_node(&self, v: NodeId) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        let neighbors = g.adjacency.remove(&v).ok_or(GraphError::MissingNode(v))?;
        for u in &neighbors {
            g.adjacency.get_mut(u).expect("symmetric adjacency").remove(&v);
        }
        g.edge_count -= neighbors.len();
        debug_assert!(g.is_consistent());
        Ok(g)
    }

    fn insert_edge(&mut self, u: NodeId, v: NodeId, line: Option<usize>) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop { line, node: u });
        }
        if self.has_edge(u, v) {
            let (u, v) = (u.min(v), u.max(v));
            return Err(GraphError::DuplicateEdge { line, u, v });
        }
        self.adjacency.entry(u).or_default().insert(v);
        self.adjacency.entry(v).or_default().insert(u);
        self.edge_count += 1;
        Ok(())
    }

    /// Symmetry, no self-loops and edge-count agreement.
    pub fn is_consistent(&self) -> bool {
        let mut half_degree_sum = 0;
        for (&v, ns) in &self.adjacency {
            if ns.contains(&v) {
                return false;
            }
            for u in ns {
                if !self.adjacency.get(u).is_some_and(|m| m.contains(&v)) {
                    return false;
                }
            }
            half_degree_sum += ns.len();
        }
        half_degree_sum == 2 * self.edge_count
    }

    /// Unweighted shortest-path hop counts from `source`.
    pub fn bfs_distances(&self, source: NodeId) -> Result<DistanceMap, GraphError> {
        if !self.contains_node(source) {
            return Err(GraphError::MissingNode(source));
        }
        let mut dist: BTreeMap<NodeId, Option<usize>> = self.nodes().map(|v| (v, None)).collect();
        dist.insert(source, Some(0));
        let mut queue = VecDeque::from([(source, 0usize)]);
        while let Some((u, d)) = queue.pop_front() {
            for w in self.neighbors(u) {
                let slot = dist.get_mut(&w).expect("known node");
                if slot.is_none() {
                    *slot = Some(d + 1);
                    queue.push_back((w, d + 1));
                }
            }
        }
        Ok(DistanceMap { source, dist })
    }

    /// One `"min max"` line per edge, sorted, joined by `\n`, no trailing newline.
    pub fn canonical_edge_list(&self) -> String {
        self.edges()
            .map(|(u, v)| format!("{u} {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Full edge-list file text: isolated nodes as single-token lines, then
    /// the canonical edges. Reparses to an identical graph.
    pub fn to_edge_list_file(&self) -> String {
        let mut out = String::new();
        for v in self.nodes().filter(|&v| self.degree(v) == 0) {
            out.push_str(&format!("{v}\n"));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses the edge-list format: `#` comments, blank lines ignored, `u v` edge
/// lines and `u` isolated-node lines.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut g = Graph::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let malformed = |reason| GraphError::MalformedLine {
            line,
            content: raw.to_string(),
            reason,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let ids = tokens
            .iter()
            .map(|t| t.parse::<NodeId>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| malformed("node ids must be non-negative integers"))?;
        match ids.as_slice() {
            [v] => {
                g.adjacency.entry(*v).or_default();
            }
            [u, v] => g.insert_edge(*u, *v, Some(line))?,
            _ => return Err(malformed("expected one or two tokens")),
        }
    }
    debug_assert!(g.is_consistent());
    Ok(g)
}

const KARATE_EDGES: &str = include_str!("../fixtures/karate.edges");

/// Zachary's karate club network (34 nodes labelled 1..=34, 78 edges).
pub fn karate_club() -> Graph {
    parse_edge_list(KARATE_EDGES).expect("bundled fixture parses")
}

/// Raw text of the bundled karate fixture.
pub fn karate_club_text() -> &'static str {
    KARATE_EDGES
}

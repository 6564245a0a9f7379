//! Replays of the three evaluation settings and exhaustive tamper sweeps.
//!
//! - original: fingerprint a network and verify it unchanged
//! - valid modification: edit, run an authorized update, verify
//! - tampered: edit without updating and verify against the old ledger
//!
//! Randomized choices use ChaCha8 seeded from a `u64`, so every report can be
//! reproduced from its seed.

use std::fmt;
use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::ledger::{
    classify_sources, compare, node_safe_hash, tamper_check, update, Authority, Ledger, LedgerError, StoreError,
    TamperReport, Verdict,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("no applicable edit for this graph")]
    NoApplicableEdit,
    #[error("network deletion cannot be authorized as an update")]
    DeleteNotUpdatable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edit {
    AddEdge(NodeId, NodeId),
    RemoveEdge(NodeId, NodeId),
    RemoveNode(NodeId),
    DeleteNetwork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    AddEdge,
    RemoveEdge,
    RemoveNode,
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edit::AddEdge(u, v) => write!(f, "add_edge:{u}:{v}"),
            Edit::RemoveEdge(u, v) => write!(f, "remove_edge:{u}:{v}"),
            Edit::RemoveNode(v) => write!(f, "remove_node:{v}"),
            Edit::DeleteNetwork => f.write_str("delete_network"),
        }
    }
}

impl Edit {
    /// Applies the edit. `None` means the whole network is gone.
    pub fn apply(&self, g: &Graph) -> Result<Option<Graph>, GraphError> {
        Ok(Some(match *self {
            Edit::AddEdge(u, v) => g.add_edge(u, v)?,
            Edit::RemoveEdge(u, v) => g.remove_edge(u, v)?,
            Edit::RemoveNode(v) => g.remove_node(v)?,
            Edit::DeleteNetwork => return Ok(None),
        }))
    }
}

/// Applies edits in order; `None` once the network has been deleted.
pub fn apply_edits(g: &Graph, edits: &[Edit]) -> Result<Option<Graph>, GraphError> {
    let mut current = g.clone();
    for edit in edits {
        match edit.apply(&current)? {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub total_cases: usize,
    pub detected: usize,
    pub detection_rate: f64,
    pub undetected_edits: Vec<Edit>,
    pub cases: Vec<(Edit, Verdict)>,
    pub seed: Option<u64>,
    pub wall_time: f64,
}

impl SweepResult {
    /// `case=<edit> verdict=<v>` lines followed by the summary line.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (edit, verdict) in &self.cases {
            out.push_str(&format!("case={edit} verdict={verdict}\n"));
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "rate={:.6} cases={} seed={}",
            self.detection_rate,
            self.total_cases,
            self.seed.map_or_else(|| "none".to_string(), |s| s.to_string())
        )
    }
}

/// Fingerprint then immediately verify. Must match.
pub fn scenario_original(g: &Graph) -> Result<TamperReport, ScenarioError> {
    let stored = node_safe_hash(g)?;
    Ok(tamper_check(g, &stored))
}

/// Applies authorized edits, updates the ledger and verifies the edited graph
/// against it.
pub fn scenario_valid_modification(
    g: &Graph,
    edits: &[Edit],
    token: &str,
    authority: &Authority,
) -> Result<TamperReport, ScenarioError> {
    let stored = node_safe_hash(g)?;
    let edited = apply_edits(g, edits)?.ok_or(ScenarioError::DeleteNotUpdatable)?;
    let fresh = update(&edited, &stored, token, authority)?;
    Ok(tamper_check(&edited, &fresh))
}

/// Applies edits without updating and verifies against the original ledger.
pub fn scenario_tampered(g: &Graph, edits: &[Edit]) -> Result<TamperReport, ScenarioError> {
    let stored = node_safe_hash(g)?;
    tampered_against(g, &stored, edits)
}

fn tampered_against(g: &Graph, stored: &Ledger, edits: &[Edit]) -> Result<TamperReport, ScenarioError> {
    match apply_edits(g, edits)? {
        Some(edited) => Ok(tamper_check(&edited, stored)),
        None => Ok(deleted_network_report(stored)),
    }
}

// Only the graph source disappears; the ledger is still there.
fn deleted_network_report(stored: &Ledger) -> TamperReport {
    let gone: Result<Graph, StoreError> = Err(StoreError::NotFound("<network>".into()));
    classify_sources(&gone, &Ok(stored.clone())).expect("absent graph is always reported")
}

/// Runs every edit as its own single-edit tamper case against one ledger.
pub fn sweep(g: &Graph, edits: &[Edit], seed: Option<u64>) -> Result<SweepResult, ScenarioError> {
    let start = Instant::now();
    let stored = node_safe_hash(g)?;
    let mut cases = Vec::with_capacity(edits.len());
    for &edit in edits {
        let report = tampered_against(g, &stored, &[edit])?;
        cases.push((edit, report.verdict));
    }
    let detected = cases.iter().filter(|(_, v)| *v != Verdict::Match).count();
    let total_cases = cases.len();
    Ok(SweepResult {
        total_cases,
        detected,
        detection_rate: if total_cases == 0 {
            0.0
        } else {
            detected as f64 / total_cases as f64
        },
        undetected_edits: cases
            .iter()
            .filter(|(_, v)| *v == Verdict::Match)
            .map(|(e, _)| *e)
            .collect(),
        cases,
        seed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Every single-edge deletion.
pub fn deletion_sweep(g: &Graph) -> Result<SweepResult, ScenarioError> {
    let edits: Vec<Edit> = g.edges().map(|(u, v)| Edit::RemoveEdge(u, v)).collect();
    sweep(g, &edits, None)
}

/// Every single-node deletion.
pub fn node_deletion_sweep(g: &Graph) -> Result<SweepResult, ScenarioError> {
    let edits: Vec<Edit> = g.nodes().map(Edit::RemoveNode).collect();
    sweep(g, &edits, None)
}

/// `count` distinct non-edges chosen with `seed`, each added on its own.
pub fn addition_sweep(g: &Graph, count: usize, seed: u64) -> Result<SweepResult, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = non_edges(g);
    if candidates.len() < count {
        return Err(ScenarioError::NoApplicableEdit);
    }
    let (chosen, _) = candidates.partial_shuffle(&mut rng, count);
    let edits: Vec<Edit> = chosen.iter().map(|&(u, v)| Edit::AddEdge(u, v)).collect();
    sweep(g, &edits, Some(seed))
}

fn non_edges(g: &Graph) -> Vec<(NodeId, NodeId)> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let mut out = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            if !g.has_edge(u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

fn kind_from(rng: &mut ChaCha8Rng) -> EditKind {
    match rng.random_range(0..3) {
        0 => EditKind::AddEdge,
        1 => EditKind::RemoveEdge,
        _ => EditKind::RemoveNode,
    }
}

/// The edit kind `random_tamper` tries first for `seed`.
pub fn preferred_kind(seed: u64) -> EditKind {
    kind_from(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Seed-deterministic structural edit. Falls back AddEdge → RemoveEdge →
/// RemoveNode when the preferred kind has no candidate.
pub fn random_tamper(g: &Graph, seed: u64) -> Result<Edit, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_edit(g, &mut rng)
}

fn random_edit(g: &Graph, rng: &mut ChaCha8Rng) -> Result<Edit, ScenarioError> {
    let mut kind = kind_from(rng);
    loop {
        match kind {
            EditKind::AddEdge => {
                let candidates = non_edges(g);
                if let Some(&(u, v)) = candidates.choose(rng) {
                    return Ok(Edit::AddEdge(u, v));
                }
                kind = EditKind::RemoveEdge;
            }
            EditKind::RemoveEdge => {
                let edges: Vec<_> = g.edges().collect();
                if let Some(&(u, v)) = edges.choose(rng) {
                    return Ok(Edit::RemoveEdge(u, v));
                }
                kind = EditKind::RemoveNode;
            }
            EditKind::RemoveNode => {
                let nodes: Vec<_> = g.nodes().collect();
                return nodes
                    .choose(rng)
                    .map(|&v| Edit::RemoveNode(v))
                    .ok_or(ScenarioError::NoApplicableEdit);
            }
        }
    }
}

/// `len` edits drawn one after another, each applicable to the graph left by
/// the previous ones.
pub fn random_edit_sequence(g: &Graph, seed: u64, len: usize) -> Result<Vec<Edit>, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = g.clone();
    let mut edits = Vec::with_capacity(len);
    for _ in 0..len {
        let edit = random_edit(&current, &mut rng)?;
        current = edit.apply(&current)?.expect("random edits never delete the network");
        edits.push(edit);
    }
    Ok(edits)
}

/// Uniform random graph on nodes `1..=n` with exactly `m` edges.
pub fn random_graph(n: u64, m: usize, seed: u64) -> Graph {
    let max_edges = (n * n.saturating_sub(1) / 2) as usize;
    assert!(m <= max_edges, "{m} edges do not fit on {n} nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    while edges.len() < m {
        let u = rng.random_range(1..=n);
        let v = rng.random_range(1..=n);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    Graph::from_nodes_and_edges(1..=n, edges).expect("distinct edges")
}

/// Random connected graph: a random spanning tree plus `extra` edges.
pub fn random_connected_graph(n: u64, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for v in 2..=n {
        let parent = rng.random_range(1..v);
        seen.insert((parent, v));
        edges.push((parent, v));
    }
    let max_edges = (n * n.saturating_sub(1) / 2) as usize;
    let target = (edges.len() + extra).min(max_edges);
    while edges.len() < target {
        let u = rng.random_range(1..=n);
        let v = rng.random_range(1..=n);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    Graph::from_nodes_and_edges(1..=n.max(1), edges).expect("distinct edges")
}

/// Linear-time comparison of two precomputed ledgers, for benchmarking.
pub fn compare_ledgers(fresh: &Ledger, stored: &Ledger) -> TamperReport {
    compare(fresh, stored)
}

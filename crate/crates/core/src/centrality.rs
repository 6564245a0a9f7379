//! The five node centralities that make up a network fingerprint.
//!
//! All accumulations run in a fixed order (sources ascending, neighbors
//! ascending) so repeated runs on equal graphs give bit-identical values.
//! Graphs with fewer than two nodes get 0 for every measure.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;
pub const DEFAULT_EIGEN_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CentralityError {
    #[error("eigenvector iteration did not converge after {iterations} iterations (last change {change:e})")]
    NotConverged { iterations: usize, change: f64 },
    #[error("eigenvector tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Per-node scores keyed by label.
pub type Scores = BTreeMap<NodeId, f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityRecord {
    pub node: NodeId,
    pub degree: f64,
    pub betweenness: f64,
    pub harmonic_closeness: f64,
    pub eccentricity: f64,
    pub eigenvector: f64,
}

/// One record per node, strictly ascending by node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CentralityTable {
    records: Vec<CentralityRecord>,
}

impl CentralityTable {
    /// Sorts the records by node. Panics on duplicate nodes.
    pub fn from_records(mut records: Vec<CentralityRecord>) -> Self {
        records.sort_by_key(|r| r.node);
        assert!(
            records.windows(2).all(|w| w[0].node < w[1].node),
            "duplicate node in centrality table"
        );
        CentralityTable { records }
    }

    pub fn records(&self) -> &[CentralityRecord] {
        &self.records
    }

    pub fn node_count(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, node: NodeId) -> Option<&CentralityRecord> {
        self.records
            .binary_search_by_key(&node, |r| r.node)
            .ok()
            .map(|i| &self.records[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenSettings {
    fn default() -> Self {
        EigenSettings {
            tol: DEFAULT_EIGEN_TOL,
            max_iter: DEFAULT_EIGEN_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub scores: Scores,
    pub eigenvalue: f64,
    pub iterations: usize,
    /// Two connected components share the leading spectral radius, so the
    /// split of weight between them depends on the start vector.
    pub degenerate_spectrum: bool,
}

/// Compressed adjacency: position `i` is the i-th smallest label and each
/// neighbor slice is ascending.
pub(crate) struct Indexed {
    pub(crate) nodes: Vec<NodeId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Indexed {
    pub(crate) fn new(g: &Graph) -> Self {
        let nodes: Vec<NodeId> = g.nodes().collect();
        assert!(nodes.len() < UNSEEN as usize, "graph too large");
        let index: BTreeMap<NodeId, u32> = nodes.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut targets = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for &v in &nodes {
            targets.extend(g.neighbors(v).map(|u| index[&u]));
            offsets.push(targets.len());
        }
        Indexed {
            nodes,
            offsets,
            targets,
        }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    fn has_edges(&self) -> bool {
        !self.targets.is_empty()
    }

    fn label(&self, values: Vec<f64>) -> Scores {
        self.nodes.iter().copied().zip(values).collect()
    }

    /// Hop counts from `source` into `dist` (`UNSEEN` when unreachable);
    /// `order` receives nodes in visiting order.
    fn bfs(&self, source: usize, dist: &mut [u32], order: &mut Vec<u32>) {
        dist.fill(UNSEEN);
        order.clear();
        dist[source] = 0;
        order.push(source as u32);
        let mut head = 0;
        while head < order.len() {
            let u = order[head] as usize;
            head += 1;
            let next = dist[u] + 1;
            for &w in self.neighbors(u) {
                if dist[w as usize] == UNSEEN {
                    dist[w as usize] = next;
                    order.push(w);
                }
            }
        }
    }
}

/// `k_v / (n - 1)`.
pub fn degree_centrality(g: &Graph) -> Scores {
    let ix = Indexed::new(g);
    ix.label(degree_values(&ix))
}

fn degree_values(ix: &Indexed) -> Vec<f64> {
    let n = ix.len();
    if n <= 1 {
        return vec![0.0; n];
    }
    let denom = (n - 1) as f64;
    (0..n).map(|v| ix.neighbors(v).len() as f64 / denom).collect()
}

/// Unnormalized betweenness, each unordered pair `{s, t}` counted once.
pub fn betweenness_centrality(g: &Graph) -> Scores {
    let ix = Indexed::new(g);
    ix.label(betweenness_values(&ix))
}

// Brandes accumulation. Every pair is seen from both endpoints, so the
// summed dependencies are halved at the end.
fn betweenness_values(ix: &Indexed) -> Vec<f64> {
    let n = ix.len();
    let mut score = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![UNSEEN; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);

    for s in 0..n {
        ix.bfs(s, &mut dist, &mut order);
        // path counts in BFS order: every predecessor is final before its successors
        for &w in &order {
            sigma[w as usize] = 0.0;
            delta[w as usize] = 0.0;
        }
        sigma[s] = 1.0;
        for &u in &order {
            let u = u as usize;
            let next = dist[u] + 1;
            for &w in ix.neighbors(u) {
                if dist[w as usize] == next {
                    sigma[w as usize] += sigma[u];
                }
            }
        }
        for &w in order.iter().rev() {
            let w = w as usize;
            let coeff = (1.0 + delta[w]) / sigma[w];
            let prev = dist[w].wrapping_sub(1);
            for &u in ix.neighbors(w) {
                if dist[u as usize] == prev {
                    delta[u as usize] += sigma[u as usize] * coeff;
                }
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    score.iter_mut().for_each(|x| *x /= 2.0);
    score
}

/// `Σ_t 1/dist(v, t)`; unreachable targets contribute nothing.
pub fn harmonic_closeness(g: &Graph) -> Scores {
    let ix = Indexed::new(g);
    ix.label(distance_measures(&ix).0)
}

/// `1 / max_t dist(v, t)`, or 0 when some node is unreachable from `v`.
pub fn eccentricity_centrality(g: &Graph) -> Scores {
    let ix = Indexed::new(g);
    ix.label(distance_measures(&ix).1)
}

fn distance_measures(ix: &Indexed) -> (Vec<f64>, Vec<f64>) {
    let n = ix.len();
    let mut closeness = vec![0.0; n];
    let mut eccentricity = vec![0.0; n];
    if n <= 1 {
        return (closeness, eccentricity);
    }
    let inverse: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { 1.0 / d as f64 }).collect();
    let mut dist = vec![UNSEEN; n];
    let mut order = Vec::with_capacity(n);
    for v in 0..n {
        ix.bfs(v, &mut dist, &mut order);
        // targets summed in ascending label order
        closeness[v] = dist
            .iter()
            .filter(|&&d| d != UNSEEN)
            .map(|&d| inverse[d as usize])
            .sum();
        if order.len() == n {
            let max = dist[*order.last().expect("source visited") as usize];
            eccentricity[v] = 1.0 / max as f64;
        }
    }
    (closeness, eccentricity)
}

/// Dominant eigenvector of the adjacency matrix by power iteration.
///
/// Iterates `x ← (A + I)x / ‖(A + I)x‖₂` from the uniform vector `1/√n`.
/// The identity shift keeps bipartite graphs (stars, paths) from
/// oscillating between `±λ` and leaves the eigenvectors unchanged. Stops once
/// the largest per-entry change drops below `tol`; the eigenvalue is the
/// Rayleigh quotient of the final vector. Graphs without edges get all-zero
/// scores and eigenvalue 0.
pub fn eigenvector_centrality(g: &Graph, settings: EigenSettings) -> Result<EigenResult, CentralityError> {
    let ix = Indexed::new(g);
    let (values, eigenvalue, iterations, degenerate_spectrum) = eigen_values(&ix, settings)?;
    Ok(EigenResult {
        scores: ix.label(values),
        eigenvalue,
        iterations,
        degenerate_spectrum,
    })
}

fn eigen_values(ix: &Indexed, settings: EigenSettings) -> Result<(Vec<f64>, f64, usize, bool), CentralityError> {
    if settings.tol.is_nan() || settings.tol <= 0.0 {
        return Err(CentralityError::InvalidTolerance(settings.tol));
    }
    let n = ix.len();
    if !ix.has_edges() {
        return Ok((vec![0.0; n], 0.0, 0, false));
    }

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < settings.max_iter {
        iterations += 1;
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = x[i] + ix.neighbors(i).iter().map(|&j| x[j as usize]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        change = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if change < settings.tol {
            break;
        }
    }
    if change >= settings.tol {
        return Err(CentralityError::NotConverged { iterations, change });
    }

    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let eigenvalue = rayleigh(ix, &x, |_| true);
    let degenerate = degenerate_spectrum(ix, &x, settings.tol);
    Ok((x, eigenvalue, iterations, degenerate))
}

fn rayleigh(ix: &Indexed, x: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in (0..x.len()).filter(|&i| keep(i)) {
        num += x[i] * ix.neighbors(i).iter().map(|&j| x[j as usize]).sum::<f64>();
        den += x[i] * x[i];
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

// Each component's slice of the iterate converges to that component's own
// Perron vector, so per-component Rayleigh quotients estimate the
// component spectral radii.
fn degenerate_spectrum(ix: &Indexed, x: &[f64], tol: f64) -> bool {
    let component = components(ix);
    let count = component.iter().copied().max().map_or(0, |m| m + 1);
    let mut radii: Vec<f64> = (0..count)
        .filter(|&c| (0..x.len()).any(|i| component[i] == c && !ix.neighbors(i).is_empty()))
        .map(|c| rayleigh(ix, x, |i| component[i] == c))
        .collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.len() >= 2 && (radii[0] - radii[1]).abs() < tol.max(1e-9)
}

fn components(ix: &Indexed) -> Vec<usize> {
    let n = ix.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &w in ix.neighbors(u) {
                let w = w as usize;
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// All five measures with default eigenvector settings.
pub fn compute_all(g: &Graph) -> Result<CentralityTable, CentralityError> {
    compute_all_with(g, EigenSettings::default())
}

pub fn compute_all_with(g: &Graph, settings: EigenSettings) -> Result<CentralityTable, CentralityError> {
    let ix = Indexed::new(g);
    let n = ix.len();
    if n <= 1 {
        return Ok(CentralityTable::from_records(
            ix.nodes
                .iter()
                .map(|&node| CentralityRecord {
                    node,
                    degree: 0.0,
                    betweenness: 0.0,
                    harmonic_closeness: 0.0,
                    eccentricity: 0.0,
                    eigenvector: 0.0,
                })
                .collect(),
        ));
    }
    let degree = degree_values(&ix);
    let betweenness = betweenness_values(&ix);
    let (closeness, eccentricity) = distance_measures(&ix);
    let (eigen, ..) = eigen_values(&ix, settings)?;
    let records = (0..n)
        .map(|i| CentralityRecord {
            node: ix.nodes[i],
            degree: degree[i],
            betweenness: betweenness[i],
            harmonic_closeness: closeness[i],
            eccentricity: eccentricity[i],
            eigenvector: eigen[i],
        })
        .collect();
    Ok(CentralityTable { records })
}

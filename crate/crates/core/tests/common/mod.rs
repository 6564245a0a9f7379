//! Independent reference implementations used by the test targets.
//!
//! Nothing here reuses the library's traversal code: distances come from
//! Floyd–Warshall on a dense matrix, betweenness from explicit enumeration
//! of shortest paths, and the eigenvector from a dense symmetric eigen solve.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use netseal::centrality::CentralityRecord;
use netseal::{Graph, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Dense {
    pub nodes: Vec<NodeId>,
    pub adj: Vec<Vec<bool>>,
    /// All-pairs hop counts; `None` when unreachable.
    pub dist: Vec<Vec<Option<usize>>>,
}

impl Dense {
    pub fn new(g: &Graph) -> Dense {
        let nodes: Vec<NodeId> = g.nodes().collect();
        let n = nodes.len();
        let pos = |v: NodeId| nodes.binary_search(&v).unwrap();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            adj[pos(u)][pos(v)] = true;
            adj[pos(v)][pos(u)] = true;
        }
        let mut dist = vec![vec![None; n]; n];
        for i in 0..n {
            dist[i][i] = Some(0);
            for j in 0..n {
                if adj[i][j] {
                    dist[i][j] = Some(1);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (dist[i][k], dist[k][j]) {
                        if dist[i][j].is_none_or(|d| a + b < d) {
                            dist[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        Dense { nodes, adj, dist }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_connected(&self) -> bool {
        self.dist.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Every shortest `s`–`t` path, as node-index sequences.
    pub fn shortest_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let Some(d) = self.dist[s][t] else { return Vec::new() };
        let mut out = Vec::new();
        let mut path = vec![s];
        self.walk(t, d, &mut path, &mut out);
        out
    }

    // Walks of exactly `d` steps ending at `t` are the shortest paths; the
    // distance bound only prunes hopeless prefixes.
    fn walk(&self, t: usize, d: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().unwrap();
        let steps = path.len() - 1;
        if steps == d {
            if cur == t {
                out.push(path.clone());
            }
            return;
        }
        for next in 0..self.len() {
            if self.adj[cur][next] && self.dist[next][t].is_some_and(|r| steps + 1 + r <= d) {
                path.push(next);
                self.walk(t, d, path, out);
                path.pop();
            }
        }
    }

    pub fn degree(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                if n <= 1 {
                    0.0
                } else {
                    self.adj[i].iter().filter(|&&b| b).count() as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    pub fn betweenness(&self) -> Vec<f64> {
        let n = self.len();
        let mut score = vec![0.0; n];
        for s in 0..n {
            for t in s + 1..n {
                let paths = self.shortest_paths(s, t);
                let sigma = paths.len() as f64;
                for p in &paths {
                    for &v in &p[1..p.len() - 1] {
                        score[v] += 1.0 / sigma;
                    }
                }
            }
        }
        score
    }

    pub fn harmonic(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&t| t != v)
                    .filter_map(|t| self.dist[v][t])
                    .map(|d| 1.0 / d as f64)
                    .sum()
            })
            .collect()
    }

    pub fn eccentricity(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|v| {
                if n <= 1 || self.dist[v].iter().any(Option::is_none) {
                    0.0
                } else {
                    1.0 / self.dist[v].iter().map(|d| d.unwrap()).max().unwrap() as f64
                }
            })
            .collect()
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| if self.adj[i][j] { 1.0 } else { 0.0 })
    }

    /// Dominant eigenpair with a nonnegative unit eigenvector, plus the gap to
    /// the next eigenvalue. Graphs without edges get zeros.
    pub fn eigen(&self) -> (Vec<f64>, f64, f64) {
        let n = self.len();
        if n <= 1 || self.adj.iter().all(|r| r.iter().all(|&b| !b)) {
            return (vec![0.0; n], 0.0, f64::INFINITY);
        }
        let e = SymmetricEigen::new(self.adjacency_matrix());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
        let top = order[0];
        let gap = e.eigenvalues[top] - e.eigenvalues[order[1]];
        let mut v: Vec<f64> = e.eigenvectors.column(top).iter().copied().collect();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        (v, e.eigenvalues[top], gap)
    }
}

type Column = (&'static str, Vec<f64>, fn(&CentralityRecord) -> f64);

/// Compares every measure with the oracles; the error describes the first
/// disagreement above `tol`.
pub fn check_against_oracles(g: &Graph, tol: f64) -> Result<(), String> {
    let table = netseal::compute_all(g).map_err(|e| e.to_string())?;
    let dense = Dense::new(g);
    if table.node_count() != dense.len() {
        return Err(format!("{} records for {} nodes", table.node_count(), dense.len()));
    }
    let records = table.records();
    let columns: [Column; 4] = [
        ("degree", dense.degree(), |r| r.degree),
        ("betweenness", dense.betweenness(), |r| r.betweenness),
        ("harmonic", dense.harmonic(), |r| r.harmonic_closeness),
        ("eccentricity", dense.eccentricity(), |r| r.eccentricity),
    ];
    for (name, expected, get) in &columns {
        for (r, want) in records.iter().zip(expected) {
            if (get(r) - want).abs() > tol {
                return Err(format!(
                    "{name} of node {}: got {} want {want}\n{}",
                    r.node,
                    get(r),
                    g.canonical_edge_list()
                ));
            }
        }
    }
    let (vector, _, gap) = dense.eigen();
    // a repeated top eigenvalue has no unique eigenvector to compare against
    if gap > 1e-6 {
        for (r, want) in records.iter().zip(&vector) {
            if (r.eigenvector - want).abs() > tol {
                return Err(format!(
                    "eigenvector of node {}: got {} want {want}\n{}",
                    r.node,
                    r.eigenvector,
                    g.canonical_edge_list()
                ));
            }
        }
    }
    Ok(())
}

/// Connected graph on `n` nodes with random labels from `1..=4n`; each edge
/// of the complete graph is kept with a per-graph random density.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let mut labels: Vec<u64> = (1..=4 * n as u64).collect();
    labels.shuffle(rng);
    labels.truncate(n);
    loop {
        let p: f64 = rng.random_range(0.15..0.95);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((labels[i], labels[j]));
                }
            }
        }
        let g = Graph::from_nodes_and_edges(labels.iter().copied(), edges).unwrap();
        if Dense::new(&g).is_connected() {
            return g;
        }
    }
}

/// Any graph on `n` nodes labelled `1..=n`, isolated nodes included.
pub fn random_any<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let p: f64 = rng.random_range(0.0..0.8);
    let mut edges = Vec::new();
    for i in 1..=n as u64 {
        for j in i + 1..=n as u64 {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_nodes_and_edges(1..=n as u64, edges).unwrap()
}

/// ‖Av − λv‖∞ and ‖v‖₂ for the library's eigenvector of `g`.
pub fn eigen_residual(g: &Graph) -> (f64, f64) {
    let r = netseal::centrality::eigenvector_centrality(g, Default::default()).unwrap();
    let residual = g
        .nodes()
        .map(|v| {
            let av: f64 = g.neighbors(v).map(|u| r.scores[&u]).sum();
            (av - r.eigenvalue * r.scores[&v]).abs()
        })
        .fold(0.0, f64::max);
    let norm = r.scores.values().map(|x| x * x).sum::<f64>().sqrt();
    (residual, norm)
}

/// SHA-1 from the RustCrypto crate.
pub fn oracle_sha1(data: &[u8]) -> String {
    use sha1::Digest;
    sha1::Sha1::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn path(k: u64) -> Graph {
    Graph::from_edges((1..k).map(|i| (i, i + 1))).unwrap()
}

pub fn star(leaves: u64) -> Graph {
    Graph::from_edges((1..=leaves).map(|i| (0, i))).unwrap()
}

pub fn complete(k: u64) -> Graph {
    Graph::from_edges((1..=k).flat_map(|i| (i + 1..=k).map(move |j| (i, j)))).unwrap()
}

pub fn cycle(k: u64) -> Graph {
    Graph::from_edges((1..=k).map(|i| (i, i % k + 1))).unwrap()
}

//! Timing of ledger comparison against full recomputation.
//!
//! Comparing a fresh ledger with a stored one walks both entry lists once,
//! so it should scale linearly with the node count. Recomputing the ledger
//! is dominated by all-pairs betweenness and is reported alongside for
//! contrast.

use std::hint::black_box;
use std::time::{Duration, Instant};

use crate::ledger::{compare, node_safe_hash, Ledger, LedgerError};
use crate::scenario::random_graph;

/// Average degree of the generated benchmark graphs.
pub const EDGES_PER_NODE: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub nodes: usize,
    pub edges: usize,
    /// Seconds per ledger comparison (best of several batches).
    pub compare_secs: f64,
    /// Seconds for one full fingerprint of the graph.
    pub recompute_secs: f64,
}

const MIN_BATCH: Duration = Duration::from_millis(20);
const ROUNDS: usize = 15;

/// Calls per batch needed for one batch of `compare` to take `MIN_BATCH`.
fn batch_size(fresh: &Ledger, stored: &Ledger) -> usize {
    let mut reps = 1usize;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(compare(black_box(fresh), black_box(stored)));
        }
        if start.elapsed() >= MIN_BATCH {
            return reps;
        }
        reps *= 2;
    }
}

fn time_batch(fresh: &Ledger, stored: &Ledger, reps: usize) -> f64 {
    let start = Instant::now();
    for _ in 0..reps {
        black_box(compare(black_box(fresh), black_box(stored)));
    }
    start.elapsed().as_secs_f64() / reps as f64
}

/// Best per-call time of `compare` over `samples` batches, each batch long
/// enough to swamp timer resolution.
pub fn time_comparison(fresh: &Ledger, stored: &Ledger, samples: usize) -> f64 {
    let reps = batch_size(fresh, stored);
    (0..samples)
        .map(|_| time_batch(fresh, stored, reps))
        .fold(f64::INFINITY, f64::min)
}

struct Prepared {
    nodes: usize,
    edges: usize,
    stored: Ledger,
    fresh: Ledger,
    recompute_secs: f64,
}

// Fingerprints a random graph (timed) and pairs the ledger with an equal
// copy; equal ledgers are the common case for a periodic check and force a
// walk over every entry.
fn prepare(nodes: usize, seed: u64) -> Result<Prepared, LedgerError> {
    let max_edges = nodes * nodes.saturating_sub(1) / 2;
    let g = random_graph(nodes as u64, (nodes * EDGES_PER_NODE).min(max_edges), seed);
    let start = Instant::now();
    let stored = node_safe_hash(&g)?;
    let recompute_secs = start.elapsed().as_secs_f64();
    Ok(Prepared {
        nodes,
        edges: g.edge_count(),
        fresh: stored.clone(),
        stored,
        recompute_secs,
    })
}

pub fn bench_size(nodes: usize, seed: u64) -> Result<BenchRow, LedgerError> {
    Ok(run_bench(&[nodes], seed)?.remove(0))
}

/// Comparison timings are taken in interleaved rounds over all sizes so that
/// slow drift of the machine affects every size alike; each size keeps its
/// best round.
pub fn run_bench(sizes: &[usize], seed: u64) -> Result<Vec<BenchRow>, LedgerError> {
    let prepared = sizes.iter().map(|&n| prepare(n, seed)).collect::<Result<Vec<_>, _>>()?;
    let reps: Vec<usize> = prepared.iter().map(|p| batch_size(&p.fresh, &p.stored)).collect();
    let mut best = vec![f64::INFINITY; prepared.len()];
    for _ in 0..ROUNDS {
        for (i, p) in prepared.iter().enumerate() {
            best[i] = best[i].min(time_batch(&p.fresh, &p.stored, reps[i]));
        }
    }
    Ok(prepared
        .into_iter()
        .zip(best)
        .map(|(p, compare_secs)| BenchRow {
            nodes: p.nodes,
            edges: p.edges,
            compare_secs,
            recompute_secs: p.recompute_secs,
        })
        .collect())
}

/// Plain-text table, one row per size, with the comparison-time ratio to the
/// previous row.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:>8} {:>8} {:>14} {:>8} {:>14}\n",
        "nodes", "edges", "compare_us", "ratio", "recompute_ms"
    );
    for (i, r) in rows.iter().enumerate() {
        let ratio = if i == 0 {
            "-".to_string()
        } else {
            format!("{:.2}", r.compare_secs / rows[i - 1].compare_secs)
        };
        out.push_str(&format!(
            "{:>8} {:>8} {:>14.3} {:>8} {:>14.3}\n",
            r.nodes,
            r.edges,
            r.compare_secs * 1e6,
            ratio,
            r.recompute_secs * 1e3
        ));
    }
    out
}

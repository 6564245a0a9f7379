//! Stored fingerprints and the checks run against them.
//!
//! A [`Ledger`] keeps one global digest over the merged centrality text plus
//! one digest per node row, so a mismatch can be traced back to the nodes
//! whose centralities moved. Note that betweenness and eigenvector values are
//! global: a single edit usually changes many rows, and only the edited
//! endpoints are guaranteed to appear in the affected list.

mod format;
mod store;

use std::cmp::Ordering;
use std::fmt;

use chrono::{DateTime, SubsecRound, Utc};
use subtle::ConstantTimeEq;
use thiserror::Error;

use crate::centrality::{compute_all_with, CentralityError, EigenSettings};
use crate::digest::{serialize_row_with, sha1, textual_merge_with, Digest160, DigestError, DEFAULT_PRECISION};
use crate::graph::{Graph, NodeId};

pub use format::FormatError;
pub use store::{
    classify_sources, detect_missing, load_graph, run_cycle, CycleError, CycleStatus, LedgerStore, StoreError,
};

pub const FORMAT_VERSION: u32 = 1;
pub const ALGORITHM: &str = "sha1";

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error(transparent)]
    Centrality(#[from] CentralityError),
    #[error(transparent)]
    Digest(#[from] DigestError),
    #[error("unauthorized")]
    Unauthorized,
}

/// How a graph is turned into digests. Stored alongside the ledger so
/// verification reproduces the same text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashSettings {
    pub precision: usize,
    pub eigen: EigenSettings,
}

impl Default for HashSettings {
    fn default() -> Self {
        HashSettings {
            precision: DEFAULT_PRECISION,
            eigen: EigenSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerEntry {
    pub node: NodeId,
    pub row_digest: Digest160,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ledger {
    pub format_version: u32,
    pub algorithm: String,
    pub precision: usize,
    pub global_digest: Digest160,
    pub node_count: usize,
    pub entries: Vec<LedgerEntry>,
    pub edge_set_digest: Digest160,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Match,
    Tampered,
    Missing,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "MATCH",
            Verdict::Tampered => "TAMPERED",
            Verdict::Missing => "MISSING",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TamperReport {
    pub verdict: Verdict,
    pub affected_nodes: Vec<NodeId>,
    pub node_count_delta: i64,
    pub details: String,
}

impl TamperReport {
    pub fn missing(details: impl Into<String>) -> Self {
        TamperReport {
            verdict: Verdict::Missing,
            affected_nodes: Vec::new(),
            node_count_delta: 0,
            details: details.into(),
        }
    }

    fn failed(details: String) -> Self {
        TamperReport {
            verdict: Verdict::Tampered,
            affected_nodes: Vec::new(),
            node_count_delta: 0,
            details,
        }
    }

    pub fn is_match(&self) -> bool {
        self.verdict == Verdict::Match
    }
}

impl fmt::Display for TamperReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.details.is_empty() {
            writeln!(f, "{}", self.verdict)?;
        } else {
            writeln!(f, "{}: {}", self.verdict, self.details)?;
        }
        if self.verdict != Verdict::Match {
            write!(f, "affected_nodes:")?;
            for v in &self.affected_nodes {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
            writeln!(f, "node_count_delta: {}", self.node_count_delta)?;
        }
        Ok(())
    }
}

/// Shared-secret check for authorized updates. Only the SHA-1 of the secret
/// is held; tokens are compared in constant time.
#[derive(Clone, PartialEq, Eq)]
pub struct Authority {
    secret_digest: Digest160,
}

impl fmt::Debug for Authority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Authority(..)")
    }
}

impl Authority {
    pub fn from_secret(secret: &str) -> Self {
        Authority {
            secret_digest: sha1(secret.as_bytes()),
        }
    }

    pub fn from_digest(secret_digest: Digest160) -> Self {
        Authority { secret_digest }
    }

    pub fn digest(&self) -> Digest160 {
        self.secret_digest
    }

    pub fn authorize(&self, token: &str) -> bool {
        let offered = sha1(token.as_bytes()).to_bytes();
        bool::from(offered.ct_eq(&self.secret_digest.to_bytes()))
    }
}

// The node id is already the entry key, so only the values are hashed and
// structurally equivalent nodes get equal row digests.
fn row_digest(row: &str) -> Digest160 {
    let values = row.split_once(':').map_or(row, |(_, v)| v);
    sha1(values.as_bytes())
}

/// Computes all centralities and records per-node and global digests.
pub fn node_safe_hash(g: &Graph) -> Result<Ledger, LedgerError> {
    node_safe_hash_with(g, HashSettings::default())
}

pub fn node_safe_hash_with(g: &Graph, settings: HashSettings) -> Result<Ledger, LedgerError> {
    let table = compute_all_with(g, settings.eigen)?;
    let merged = textual_merge_with(&table, settings.precision)?;
    let entries = table
        .records()
        .iter()
        .map(|r| {
            Ok(LedgerEntry {
                node: r.node,
                row_digest: row_digest(&serialize_row_with(r, settings.precision)?),
            })
        })
        .collect::<Result<Vec<_>, DigestError>>()?;
    Ok(Ledger {
        format_version: FORMAT_VERSION,
        algorithm: ALGORITHM.to_string(),
        precision: settings.precision,
        global_digest: sha1(merged.text.as_bytes()),
        node_count: entries.len(),
        entries,
        edge_set_digest: sha1(g.canonical_edge_list().as_bytes()),
        created_at: Utc::now().trunc_subsecs(3),
    })
}

/// Recomputes a ledger for `g` and compares it with `stored`. Never fails:
/// any error while recomputing is reported as tampering.
pub fn tamper_check(g: &Graph, stored: &Ledger) -> TamperReport {
    tamper_check_with(g, stored, EigenSettings::default())
}

pub fn tamper_check_with(g: &Graph, stored: &Ledger, eigen: EigenSettings) -> TamperReport {
    if stored.algorithm != ALGORITHM || stored.format_version != FORMAT_VERSION {
        return TamperReport::failed(format!(
            "unsupported ledger version={} algorithm={}",
            stored.format_version, stored.algorithm
        ));
    }
    let settings = HashSettings {
        precision: stored.precision,
        eigen,
    };
    match node_safe_hash_with(g, settings) {
        Ok(fresh) => compare(&fresh, stored),
        Err(e) => TamperReport::failed(format!("recomputation failed: {e}")),
    }
}

/// Compares two ledgers entry by entry. Linear in the node count.
pub fn compare(fresh: &Ledger, stored: &Ledger) -> TamperReport {
    let mut affected = Vec::new();
    let mut changed_rows = 0usize;
    let (mut added, mut removed) = (0usize, 0usize);
    let (mut i, mut j) = (0, 0);
    let (a, b) = (&fresh.entries, &stored.entries);
    while i < a.len() || j < b.len() {
        let order = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.node.cmp(&y.node),
            (Some(_), None) => Ordering::Less,
            (None, _) => Ordering::Greater,
        };
        match order {
            Ordering::Less => {
                affected.push(a[i].node);
                added += 1;
                i += 1;
            }
            Ordering::Greater => {
                affected.push(b[j].node);
                removed += 1;
                j += 1;
            }
            Ordering::Equal => {
                if a[i].row_digest != b[j].row_digest {
                    affected.push(a[i].node);
                    changed_rows += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }

    let delta = fresh.node_count as i64 - stored.node_count as i64;
    let global_equal = fresh.global_digest == stored.global_digest;
    let edges_equal = fresh.edge_set_digest == stored.edge_set_digest;
    let verdict = if global_equal && affected.is_empty() && delta == 0 {
        Verdict::Match
    } else {
        Verdict::Tampered
    };

    let mut notes = Vec::new();
    if !global_equal {
        notes.push(format!(
            "global digest {} != stored {}",
            fresh.global_digest, stored.global_digest
        ));
    }
    if changed_rows > 0 {
        notes.push(format!("{changed_rows} node rows changed"));
    }
    if added > 0 {
        notes.push(format!("{added} nodes added"));
    }
    if removed > 0 {
        notes.push(format!("{removed} nodes removed"));
    }
    if !edges_equal {
        notes.push("edge set changed".to_string());
    }
    TamperReport {
        verdict,
        affected_nodes: affected,
        node_count_delta: delta,
        details: notes.join("; "),
    }
}

/// Re-fingerprints `g` after an authorized change. The caller decides
/// where the old ledger goes; `stored` is never modified.
pub fn update(g: &Graph, stored: &Ledger, token: &str, authority: &Authority) -> Result<Ledger, LedgerError> {
    update_with(g, stored, token, authority, EigenSettings::default())
}

pub fn update_with(
    g: &Graph,
    stored: &Ledger,
    token: &str,
    authority: &Authority,
    eigen: EigenSettings,
) -> Result<Ledger, LedgerError> {
    if !authority.authorize(token) {
        return Err(LedgerError::Unauthorized);
    }
    node_safe_hash_with(
        g,
        HashSettings {
            precision: stored.precision,
            eigen,
        },
    )
}

//! Centrality-based fingerprinting and tamper detection for undirected networks.
//!
//! A network's degree, betweenness, harmonic closeness, eccentricity and
//! eigenvector centralities are merged into canonical text and hashed with
//! SHA-1. The resulting ledger is later compared against a fresh computation
//! to detect, and roughly localize, structural changes.

pub mod bench;
pub mod centrality;
pub mod cli;
pub mod digest;
pub mod graph;
pub mod ledger;
pub mod scenario;

pub use centrality::{compute_all, CentralityRecord, CentralityTable};
pub use digest::{fingerprint, sha1, Digest160};
pub use graph::{parse_edge_list, Graph, GraphError, NodeId};
pub use ledger::{node_safe_hash, tamper_check, Ledger, TamperReport, Verdict};

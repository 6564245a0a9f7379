//! Canonical text form of a centrality table and its SHA-1 fingerprint.
//!
//! A row is `ID:D:B:C:E:V` with each value printed to a fixed number of
//! decimal places (6 by default), rounding ties to even. Rows are ordered by
//! node and each is terminated by `\n`.

mod sha1;

pub use self::sha1::{sha1, Digest160, DigestParseError, Sha1};

use thiserror::Error;

use crate::centrality::{CentralityRecord, CentralityTable};
use crate::graph::NodeId;

pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DigestError {
    #[error("node {node}: non-finite {measure} value {value}")]
    NonFiniteValue {
        node: NodeId,
        measure: &'static str,
        value: f64,
    },
}

/// Merged text of a whole table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MergedCentralities {
    pub text: String,
}

impl MergedCentralities {
    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.text.lines()
    }
}

fn render(value: f64, precision: usize) -> String {
    let s = format!("{value:.precision$}");
    // "-0.000000" and friends collapse to the unsigned zero
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn serialize_row(r: &CentralityRecord) -> Result<String, DigestError> {
    serialize_row_with(r, DEFAULT_PRECISION)
}

pub fn serialize_row_with(r: &CentralityRecord, precision: usize) -> Result<String, DigestError> {
    let measures = [
        ("degree", r.degree),
        ("betweenness", r.betweenness),
        ("closeness", r.harmonic_closeness),
        ("eccentricity", r.eccentricity),
        ("eigenvector", r.eigenvector),
    ];
    let mut line = r.node.to_string();
    for (measure, value) in measures {
        if !value.is_finite() {
            return Err(DigestError::NonFiniteValue {
                node: r.node,
                measure,
                value,
            });
        }
        line.push(':');
        line.push_str(&render(value, precision));
    }
    Ok(line)
}

pub fn textual_merge(t: &CentralityTable) -> Result<MergedCentralities, DigestError> {
    textual_merge_with(t, DEFAULT_PRECISION)
}

pub fn textual_merge_with(t: &CentralityTable, precision: usize) -> Result<MergedCentralities, DigestError> {
    let mut text = String::new();
    for r in t.records() {
        text.push_str(&serialize_row_with(r, precision)?);
        text.push('\n');
    }
    Ok(MergedCentralities { text })
}

/// SHA-1 of the merged text.
pub fn fingerprint(t: &CentralityTable) -> Result<Digest160, DigestError> {
    fingerprint_with(t, DEFAULT_PRECISION)
}

pub fn fingerprint_with(t: &CentralityTable, precision: usize) -> Result<Digest160, DigestError> {
    Ok(sha1(textual_merge_with(t, precision)?.text.as_bytes()))
}

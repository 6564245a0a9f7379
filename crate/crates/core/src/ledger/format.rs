//! Line-oriented ledger file.
//!
//! ```text
//! version=1
//! algorithm=sha1
//! nodes=<n>
//! global=<40 hex>
//! edges=<40 hex>
//! created=<RFC 3339 UTC>
//! precision=<p>            (only when p != 6)
//! <node> <40 hex>          (n lines, ascending node)
//! end=<40 hex>
//! ```
//!
//! `end` is the SHA-1 of every byte before it, so truncation or any edit of
//! the file is caught at load time.

use chrono::{DateTime, SecondsFormat, Utc};
use thiserror::Error;

use super::{Ledger, LedgerEntry};
use crate::digest::{sha1, Digest160, DEFAULT_PRECISION};
use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ledger line {line}: {reason}")]
pub struct FormatError {
    pub line: usize,
    pub reason: String,
}

fn err(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError {
        line,
        reason: reason.into(),
    }
}

impl Ledger {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("version={}\n", self.format_version));
        out.push_str(&format!("algorithm={}\n", self.algorithm));
        out.push_str(&format!("nodes={}\n", self.node_count));
        out.push_str(&format!("global={}\n", self.global_digest));
        out.push_str(&format!("edges={}\n", self.edge_set_digest));
        out.push_str(&format!(
            "created={}\n",
            self.created_at.to_rfc3339_opts(SecondsFormat::Millis, true)
        ));
        if self.precision != DEFAULT_PRECISION {
            out.push_str(&format!("precision={}\n", self.precision));
        }
        for e in &self.entries {
            out.push_str(&format!("{} {}\n", e.node, e.row_digest));
        }
        let seal = sha1(out.as_bytes());
        out.push_str(&format!("end={seal}\n"));
        out
    }

    pub fn parse(text: &str) -> Result<Ledger, FormatError> {
        let body_end = text
            .rfind("end=")
            .filter(|&i| i == 0 || text.as_bytes()[i - 1] == b'\n')
            .ok_or_else(|| err(0, "missing end seal"))?;
        let (body, seal_line) = text.split_at(body_end);
        let seal_line = seal_line
            .strip_suffix('\n')
            .ok_or_else(|| err(0, "seal line not newline-terminated"))?;
        let seal: Digest160 = seal_line["end=".len()..]
            .parse()
            .map_err(|e: crate::digest::DigestParseError| err(0, e.to_string()))?;
        if sha1(body.as_bytes()) != seal {
            return Err(err(0, "seal mismatch: ledger file modified or truncated"));
        }

        let mut lines = body.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        let mut header = |key: &str| -> Result<(usize, String), FormatError> {
            let (no, line) = lines.next().ok_or_else(|| err(0, format!("missing {key}=")))?;
            let value = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| err(no, format!("expected {key}=")))?;
            Ok((no, value.to_string()))
        };
        let (no, v) = header("version")?;
        let format_version: u32 = v.parse().map_err(|_| err(no, "bad version"))?;
        let (_, algorithm) = header("algorithm")?;
        let (no, v) = header("nodes")?;
        let node_count: usize = v.parse().map_err(|_| err(no, "bad node count"))?;
        let (no, v) = header("global")?;
        let global_digest: Digest160 = v.parse().map_err(|_| err(no, "bad global digest"))?;
        let (no, v) = header("edges")?;
        let edge_set_digest: Digest160 = v.parse().map_err(|_| err(no, "bad edge digest"))?;
        let (no, v) = header("created")?;
        let created_at = DateTime::parse_from_rfc3339(&v)
            .ok()
            .filter(|t| t.offset().local_minus_utc() == 0)
            .ok_or_else(|| err(no, "bad created timestamp"))?
            .with_timezone(&Utc);

        let mut precision = DEFAULT_PRECISION;
        if let Some((no, line)) = lines.peek().copied() {
            if let Some(v) = line.strip_prefix("precision=") {
                precision = v
                    .parse()
                    .ok()
                    .filter(|&p| p >= 1)
                    .ok_or_else(|| err(no, "bad precision"))?;
                lines.next();
            }
        }

        let mut entries: Vec<LedgerEntry> = Vec::with_capacity(node_count);
        for (no, line) in lines {
            let (node, digest) = line
                .split_once(' ')
                .ok_or_else(|| err(no, "expected '<node> <digest>'"))?;
            let node: NodeId = node.parse().map_err(|_| err(no, "bad node id"))?;
            let row_digest: Digest160 = digest.parse().map_err(|_| err(no, "bad row digest"))?;
            if entries.last().is_some_and(|last| last.node >= node) {
                return Err(err(no, "entries not strictly ascending"));
            }
            entries.push(LedgerEntry { node, row_digest });
        }
        if entries.len() != node_count {
            return Err(err(0, format!("nodes={node_count} but {} entries", entries.len())));
        }

        Ok(Ledger {
            format_version,
            algorithm,
            precision,
            global_digest,
            node_count,
            entries,
            edge_set_digest,
            created_at,
        })
    }
}

//! On-disk ledger store and the verification cycle.
//!
//! Next to the ledger file `L` the store keeps:
//! - `L.<seq>`: archived ledgers, one per authorized update, `seq` starting at 1
//! - `L.auth`: `sha1=<hex>` digest of the update secret
//! - `L.lock`: advisory lock taken while committing

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{
    node_safe_hash_with, tamper_check_with, update_with, Authority, HashSettings, Ledger, LedgerError, TamperReport,
};
use crate::centrality::EigenSettings;
use crate::digest::Digest160;
use crate::graph::{parse_edge_list, Graph, GraphError};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0}: not found")]
    NotFound(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: super::FormatError },
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: GraphError },
}

impl StoreError {
    fn io(path: &Path, source: io::Error) -> Self {
        if source.kind() == io::ErrorKind::NotFound {
            StoreError::NotFound(path.to_path_buf())
        } else {
            StoreError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, StoreError::NotFound(_))
    }
}

/// Reads and parses an edge-list file.
pub fn load_graph(path: &Path) -> Result<Graph, StoreError> {
    let text = fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
    parse_edge_list(&text).map_err(|source| StoreError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone)]
pub struct LedgerStore {
    path: PathBuf,
}

/// Held while a commit is in progress.
pub struct StoreLock {
    _file: File,
}

impl LedgerStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        LedgerStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn sibling(&self, suffix: &str) -> PathBuf {
        let mut name = self.path.file_name().unwrap_or_default().to_os_string();
        name.push(suffix);
        self.path.with_file_name(name)
    }

    pub fn auth_path(&self) -> PathBuf {
        self.sibling(".auth")
    }

    pub fn archive_path(&self, seq: u64) -> PathBuf {
        self.sibling(&format!(".{seq}"))
    }

    pub fn exists(&self) -> bool {
        self.path.exists()
    }

    pub fn load(&self) -> Result<Ledger, StoreError> {
        let text = fs::read_to_string(&self.path).map_err(|e| StoreError::io(&self.path, e))?;
        Ledger::parse(&text).map_err(|source| StoreError::Format {
            path: self.path.clone(),
            source,
        })
    }

    /// Blocks until the store's advisory lock is held.
    pub fn lock(&self) -> Result<StoreLock, StoreError> {
        let path = self.sibling(".lock");
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)
            .map_err(|e| StoreError::io(&path, e))?;
        file.lock().map_err(|e| StoreError::io(&path, e))?;
        Ok(StoreLock { _file: file })
    }

    /// Archived sequence numbers in ascending order.
    pub fn archives(&self) -> Result<Vec<u64>, StoreError> {
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let prefix = format!("{}.", self.path.file_name().unwrap_or_default().to_string_lossy());
        let mut seqs = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| StoreError::io(&dir, e))? {
            let entry = entry.map_err(|e| StoreError::io(&dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some(seq) = name.strip_prefix(&prefix).and_then(|s| s.parse::<u64>().ok()) {
                seqs.push(seq);
            }
        }
        seqs.sort_unstable();
        Ok(seqs)
    }

    /// Writes `ledger` as the current ledger. An existing ledger is first
    /// moved to the next archive slot, whose number is returned.
    pub fn commit(&self, ledger: &Ledger) -> Result<Option<u64>, StoreError> {
        let _guard = self.lock()?;
        let archived = if self.exists() {
            let seq = self.archives()?.last().map_or(1, |s| s + 1);
            let dest = self.archive_path(seq);
            fs::copy(&self.path, &dest).map_err(|e| StoreError::io(&dest, e))?;
            Some(seq)
        } else {
            None
        };
        let tmp = self.sibling(".tmp");
        let mut file = File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
        file.write_all(ledger.to_text().as_bytes())
            .and_then(|_| file.sync_all())
            .map_err(|e| StoreError::io(&tmp, e))?;
        fs::rename(&tmp, &self.path).map_err(|e| StoreError::io(&self.path, e))?;
        Ok(archived)
    }

    pub fn load_authority(&self) -> Result<Option<Authority>, StoreError> {
        let path = self.auth_path();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(StoreError::io(&path, e)),
        };
        let digest = text
            .trim_end()
            .strip_prefix("sha1=")
            .and_then(|h| h.parse::<Digest160>().ok())
            .ok_or_else(|| StoreError::Io {
                path: path.clone(),
                source: io::Error::new(io::ErrorKind::InvalidData, "expected sha1=<40 hex>"),
            })?;
        Ok(Some(Authority::from_digest(digest)))
    }

    pub fn save_authority(&self, authority: &Authority) -> Result<(), StoreError> {
        let path = self.auth_path();
        fs::write(&path, format!("sha1={}\n", authority.digest())).map_err(|e| StoreError::io(&path, e))
    }
}

/// Converts missing or unreadable sources into a `MISSING` report. Returns
/// `None` when both the graph and the ledger load.
pub fn detect_missing(graph_path: &Path, store: &LedgerStore) -> Option<TamperReport> {
    classify_sources(&load_graph(graph_path), &store.load())
}

/// The decision behind [`detect_missing`], on already-attempted loads.
pub fn classify_sources(
    graph: &Result<Graph, StoreError>,
    ledger: &Result<Ledger, StoreError>,
) -> Option<TamperReport> {
    match (graph, ledger) {
        (Ok(_), Ok(_)) => None,
        (Err(g), Err(l)) if g.is_not_found() && l.is_not_found() => {
            Some(TamperReport::missing("network and ledger both absent"))
        }
        (Err(g), _) if g.is_not_found() => Some(TamperReport::missing("network deleted")),
        (Err(g), _) => Some(TamperReport::missing(format!("network unreadable ({g})"))),
        (Ok(_), Err(l)) if l.is_not_found() => Some(TamperReport::missing("ledger deleted or never initialized")),
        (Ok(_), Err(l)) => Some(TamperReport::missing(format!("ledger corrupt ({l})"))),
    }
}

#[derive(Debug, Error)]
pub enum CycleError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleStatus {
    /// Graph verifies against the stored ledger.
    Ok,
    /// First ledger written for a graph (authorized).
    Initialized {
        global: Digest160,
    },
    /// Authorized change re-fingerprinted; the old ledger went to `archived`.
    Updated {
        global: Digest160,
        archived: Option<u64>,
    },
    Alarm(TamperReport),
}

/// One pass of the monitoring loop.
///
/// `auth` carries a token when the caller declares the current state of the
/// graph to be an authorized change. Without it, any mismatch is an alarm.
pub fn run_cycle(
    graph_path: &Path,
    store: &LedgerStore,
    auth: Option<&str>,
    eigen: EigenSettings,
) -> Result<CycleStatus, CycleError> {
    let graph = load_graph(graph_path);
    let ledger = store.load();

    if let (Err(g), Err(l)) = (&graph, &ledger) {
        if g.is_not_found() && l.is_not_found() {
            return Err(CycleError::Config(format!(
                "neither {} nor {} exists",
                graph_path.display(),
                store.path().display()
            )));
        }
    }

    if let (Ok(g), Err(l), Some(token)) = (&graph, &ledger, auth) {
        if l.is_not_found() {
            let authority = match store.load_authority()? {
                Some(a) if !a.authorize(token) => {
                    let mut report = TamperReport::missing("ledger deleted or never initialized");
                    report.details.push_str("; initialization rejected: unauthorized");
                    return Ok(CycleStatus::Alarm(report));
                }
                Some(a) => a,
                None => Authority::from_secret(token),
            };
            let fresh = node_safe_hash_with(
                g,
                HashSettings {
                    eigen,
                    ..HashSettings::default()
                },
            )?;
            store.save_authority(&authority)?;
            store.commit(&fresh)?;
            return Ok(CycleStatus::Initialized {
                global: fresh.global_digest,
            });
        }
    }

    if let Some(report) = classify_sources(&graph, &ledger) {
        return Ok(CycleStatus::Alarm(report));
    }
    let (graph, stored) = (graph?, ledger?);

    let report = tamper_check_with(&graph, &stored, eigen);
    if report.is_match() {
        return Ok(CycleStatus::Ok);
    }
    let Some(token) = auth else {
        return Ok(CycleStatus::Alarm(report));
    };
    let Some(authority) = store.load_authority()? else {
        return Ok(CycleStatus::Alarm(annotate(
            report,
            "update rejected: no update secret configured",
        )));
    };
    match update_with(&graph, &stored, token, &authority, eigen) {
        Ok(fresh) => {
            let archived = store.commit(&fresh)?;
            Ok(CycleStatus::Updated {
                global: fresh.global_digest,
                archived,
            })
        }
        Err(LedgerError::Unauthorized) => Ok(CycleStatus::Alarm(annotate(report, "update rejected: unauthorized"))),
        Err(e) => Ok(CycleStatus::Alarm(annotate(report, &format!("update failed: {e}")))),
    }
}

fn annotate(mut report: TamperReport, note: &str) -> TamperReport {
    if !report.details.is_empty() {
        report.details.push_str("; ");
    }
    report.details.push_str(note);
    report
}

//! Command-line front end.
//!
//! Exit codes: 0 clean or match, 1 tamper alarm or unauthorized, 2 usage,
//! configuration or input errors. The update token is only ever read from
//! the environment variable named by `--token-env`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{render_table, run_bench};
use crate::centrality::{compute_all_with, EigenSettings, DEFAULT_EIGEN_MAX_ITER, DEFAULT_EIGEN_TOL};
use crate::digest::{textual_merge_with, DEFAULT_PRECISION};
use crate::graph::{karate_club, Graph, NodeId};
use crate::ledger::{
    load_graph, node_safe_hash_with, run_cycle, update_with, Authority, CycleError, CycleStatus, HashSettings,
    LedgerError, LedgerStore, StoreError, Verdict,
};
use crate::scenario::{
    deletion_sweep, random_edit_sequence, random_tamper, scenario_original, scenario_tampered,
    scenario_valid_modification,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ALARM: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const DEFAULT_TOKEN_ENV: &str = "NETSEAL_TOKEN";

/// Number of edits in a simulated authorized change.
const VALID_EDITS: usize = 3;

#[derive(Debug, Parser)]
#[command(
    name = "netseal",
    version,
    about = "Centrality fingerprints and tamper checks for networks"
)]
pub struct Cli {
    /// Edge-list file
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Ledger file (defaults to <graph>.ledger)
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,
    /// Decimal places used when rendering and hashing centralities
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION as u16, value_parser = clap::value_parser!(u16).range(1..=17))]
    precision: u16,
    /// Eigenvector convergence tolerance
    #[arg(long, global = true, default_value_t = DEFAULT_EIGEN_TOL)]
    eigen_tol: f64,
    /// Environment variable holding the update token
    #[arg(long, global = true, default_value = DEFAULT_TOKEN_ENV)]
    token_env: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fingerprint the graph and write the first ledger
    Init {
        /// Replace an existing ledger (the old one is archived)
        #[arg(long)]
        force: bool,
    },
    /// Check the graph against its ledger
    Verify {
        /// Accept a mismatch as an authorized change (needs the token)
        #[arg(long)]
        authorized: bool,
    },
    /// Re-fingerprint after an authorized change
    Update,
    /// Print the centrality table
    Centrality {
        /// Only this node
        #[arg(long)]
        node: Option<u64>,
        /// Print the merged text that gets hashed instead of the table
        #[arg(long)]
        merged: bool,
    },
    /// Replay an evaluation scenario
    Simulate {
        #[arg(long, value_enum)]
        scenario: ScenarioKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time ledger comparison and full recomputation at several sizes
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioKind {
    Original,
    Valid,
    Tamper,
    Sweep,
}

/// Resolved configuration shared by the commands.
#[derive(Debug, Clone)]
pub struct Config {
    pub graph_path: Option<PathBuf>,
    pub ledger_path: Option<PathBuf>,
    pub precision: usize,
    pub eigen_tol: f64,
    pub token_env: String,
}

impl Config {
    fn eigen(&self) -> EigenSettings {
        EigenSettings {
            tol: self.eigen_tol,
            max_iter: DEFAULT_EIGEN_MAX_ITER,
        }
    }

    fn hash_settings(&self) -> HashSettings {
        HashSettings {
            precision: self.precision,
            eigen: self.eigen(),
        }
    }

    fn require_graph(&self) -> Result<&Path, String> {
        self.graph_path
            .as_deref()
            .ok_or_else(|| "--graph is required".to_string())
    }

    fn store(&self) -> Result<LedgerStore, String> {
        match (&self.ledger_path, &self.graph_path) {
            (Some(l), _) => Ok(LedgerStore::new(l)),
            (None, Some(g)) => {
                let mut name = g.as_os_str().to_os_string();
                name.push(".ledger");
                Ok(LedgerStore::new(name))
            }
            (None, None) => Err("--ledger or --graph is required".to_string()),
        }
    }

    fn token(&self) -> Option<String> {
        std::env::var(&self.token_env).ok().filter(|t| !t.is_empty())
    }

    /// The configured graph, or the bundled karate fixture when none is given.
    fn graph_or_fixture(&self) -> Result<Graph, StoreError> {
        match &self.graph_path {
            Some(p) => load_graph(p),
            None => Ok(karate_club()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    if cli.eigen_tol.is_nan() || cli.eigen_tol <= 0.0 {
        let _ = writeln!(err, "error: --eigen-tol must be positive");
        return EXIT_USAGE;
    }
    let config = Config {
        graph_path: cli.graph,
        ledger_path: cli.ledger,
        precision: cli.precision as usize,
        eigen_tol: cli.eigen_tol,
        token_env: cli.token_env,
    };
    let result = match cli.command {
        Command::Init { force } => cmd_init(&config, force, out),
        Command::Verify { authorized } => cmd_verify(&config, authorized, out),
        Command::Update => cmd_update(&config, out),
        Command::Centrality { node, merged } => cmd_centrality(&config, node.map(NodeId), merged, out),
        Command::Simulate { scenario, seed } => cmd_simulate(&config, scenario, seed, out, err),
        Command::Bench { sizes, seed } => cmd_bench(&sizes, seed, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(u8, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

type CmdResult = Result<u8, Failure>;

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| usage(format!("writing output: {e}")))
}

fn cmd_init(config: &Config, force: bool, out: &mut dyn Write) -> CmdResult {
    let graph_path = config.require_graph().map_err(usage)?;
    let store = config.store().map_err(usage)?;
    let graph = load_graph(graph_path).map_err(usage)?;
    if store.exists() && !force {
        return Err(usage(format!("ledger exists: {}", store.path().display())));
    }
    let ledger = node_safe_hash_with(&graph, config.hash_settings()).map_err(usage)?;
    if let Some(token) = config.token() {
        store.save_authority(&Authority::from_secret(&token)).map_err(usage)?;
    }
    store.commit(&ledger).map_err(usage)?;
    emit(
        out,
        &format!(
            "initialized nodes={} global={}\n",
            ledger.node_count, ledger.global_digest
        ),
    )?;
    Ok(EXIT_OK)
}

fn cmd_verify(config: &Config, authorized: bool, out: &mut dyn Write) -> CmdResult {
    let graph_path = config.require_graph().map_err(usage)?;
    let store = config.store().map_err(usage)?;
    let token = if authorized {
        match config.token() {
            Some(t) => Some(t),
            None => {
                emit(out, "unauthorized: token not set\n")?;
                return Ok(EXIT_ALARM);
            }
        }
    } else {
        None
    };
    match run_cycle(graph_path, &store, token.as_deref(), config.eigen()) {
        Ok(CycleStatus::Ok) => {
            emit(out, "MATCH\n")?;
            Ok(EXIT_OK)
        }
        Ok(CycleStatus::Initialized { global }) => {
            emit(out, &format!("INITIALIZED global={global}\n"))?;
            Ok(EXIT_OK)
        }
        Ok(CycleStatus::Updated { global, archived }) => {
            emit(out, &format!("UPDATED global={global}{}\n", archive_note(archived)))?;
            Ok(EXIT_OK)
        }
        Ok(CycleStatus::Alarm(report)) => {
            emit(out, &report.to_string())?;
            Ok(EXIT_ALARM)
        }
        Err(CycleError::Config(msg)) => Err(usage(msg)),
        // fail closed
        Err(e) => {
            emit(out, &format!("ALARM: verification failed: {e}\n"))?;
            Ok(EXIT_ALARM)
        }
    }
}

fn archive_note(archived: Option<u64>) -> String {
    archived.map(|s| format!(" archived={s}")).unwrap_or_default()
}

fn cmd_update(config: &Config, out: &mut dyn Write) -> CmdResult {
    let graph_path = config.require_graph().map_err(usage)?;
    let store = config.store().map_err(usage)?;
    let Some(token) = config.token() else {
        emit(out, "unauthorized: token not set\n")?;
        return Ok(EXIT_ALARM);
    };
    let graph = load_graph(graph_path).map_err(usage)?;
    let stored = store.load().map_err(usage)?;
    let Some(authority) = store.load_authority().map_err(usage)? else {
        emit(out, "unauthorized: no update secret configured for this ledger\n")?;
        return Ok(EXIT_ALARM);
    };
    match update_with(&graph, &stored, &token, &authority, config.eigen()) {
        Ok(fresh) => {
            let archived = store.commit(&fresh).map_err(usage)?;
            emit(
                out,
                &format!("UPDATED global={}{}\n", fresh.global_digest, archive_note(archived)),
            )?;
            Ok(EXIT_OK)
        }
        Err(LedgerError::Unauthorized) => {
            emit(out, "unauthorized\n")?;
            Ok(EXIT_ALARM)
        }
        Err(e) => Err(usage(e)),
    }
}

fn cmd_centrality(config: &Config, node: Option<NodeId>, merged: bool, out: &mut dyn Write) -> CmdResult {
    let graph = config.graph_or_fixture().map_err(usage)?;
    if let Some(v) = node {
        if !graph.contains_node(v) {
            return Err(usage(format!("no such node {v}")));
        }
    }
    let table = compute_all_with(&graph, config.eigen()).map_err(usage)?;
    if merged {
        let text = textual_merge_with(&table, config.precision).map_err(usage)?.text;
        let text = match node {
            Some(v) => text
                .lines()
                .filter(|l| l.split(':').next() == Some(&v.to_string()))
                .map(|l| format!("{l}\n"))
                .collect(),
            None => text,
        };
        emit(out, &text)?;
        return Ok(EXIT_OK);
    }
    let p = config.precision;
    let mut text = String::from("node degree betweenness closeness eccentricity eigenvector\n");
    for r in table.records().iter().filter(|r| node.is_none_or(|v| v == r.node)) {
        text.push_str(&format!(
            "{} {:.p$} {:.p$} {:.p$} {:.p$} {:.p$}\n",
            r.node, r.degree, r.betweenness, r.harmonic_closeness, r.eccentricity, r.eigenvector
        ));
    }
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_simulate(
    config: &Config,
    scenario: ScenarioKind,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let graph = config.graph_or_fixture().map_err(usage)?;
    let mut text = String::new();
    let expected = match scenario {
        ScenarioKind::Original => {
            let report = scenario_original(&graph).map_err(usage)?;
            text.push_str("scenario=original\n");
            text.push_str(&report.to_string());
            report.verdict == Verdict::Match
        }
        ScenarioKind::Valid => {
            // the simulation plays both the administrator and the operator
            let secret = format!("simulation-{seed}");
            let authority = Authority::from_secret(&secret);
            let edits = random_edit_sequence(&graph, seed, VALID_EDITS).map_err(usage)?;
            text.push_str("scenario=valid\n");
            for e in &edits {
                text.push_str(&format!("edit={e}\n"));
            }
            let report = scenario_valid_modification(&graph, &edits, &secret, &authority).map_err(usage)?;
            text.push_str(&report.to_string());
            text.push_str(&format!("seed={seed}\n"));
            report.verdict == Verdict::Match
        }
        ScenarioKind::Tamper => {
            let edit = random_tamper(&graph, seed).map_err(usage)?;
            let report = scenario_tampered(&graph, &[edit]).map_err(usage)?;
            text.push_str(&format!("scenario=tamper\nedit={edit}\n"));
            text.push_str(&report.to_string());
            text.push_str(&format!("seed={seed}\n"));
            report.verdict != Verdict::Match
        }
        ScenarioKind::Sweep => {
            if graph.edge_count() == 0 {
                return Err(usage("sweep needs a graph with at least one edge"));
            }
            let mut result = deletion_sweep(&graph).map_err(usage)?;
            result.seed = Some(seed);
            text.push_str(&result.report());
            let _ = writeln!(err, "sweep wall time {:.3}s", result.wall_time);
            result.detected == result.total_cases
        }
    };
    emit(out, &text)?;
    Ok(if expected { EXIT_OK } else { EXIT_ALARM })
}

fn cmd_bench(sizes: &[usize], seed: u64, out: &mut dyn Write) -> CmdResult {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(usage("--sizes must be positive node counts"));
    }
    let rows = run_bench(sizes, seed).map_err(usage)?;
    emit(out, &render_table(&rows))?;
    Ok(EXIT_OK)
}

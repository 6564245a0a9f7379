//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the report stays readable.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use netseal::bench::{render_table, run_bench};
use netseal::centrality::harmonic_closeness;
use netseal::ledger::{run_cycle, update, Authority, CycleStatus, LedgerError, LedgerStore};
use netseal::scenario::{
    addition_sweep, apply_edits, deletion_sweep, node_deletion_sweep, random_connected_graph, random_edit_sequence,
    random_graph, scenario_original, scenario_tampered, scenario_valid_modification, Edit,
};
use netseal::{graph::karate_club, graph::karate_club_text, node_safe_hash, parse_edge_list, sha1, tamper_check};
use netseal::{Graph, Ledger, NodeId, Verdict};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_against_oracles, eigen_residual, oracle_sha1, random_any, random_connected};

const KARATE_FINGERPRINT: &str = "23c3a13318de066603cbdba5e8eec385228b0b89";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, || {
        format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn sha1_correctness() -> Outcome {
    let start = Instant::now();
    let million = vec![b'a'; 1_000_000];
    let vectors: [(&[u8], &str); 3] = [
        (b"abc", "a9993e364706816aba3e25717850c26c9cd0d89d"),
        (b"", "da39a3ee5e6b4b0d3255bfef95601890afd80709"),
        (&million, "34aa973cd4c4daa4f61eeb2bdbad27316534016f"),
    ];
    for (input, expected) in vectors {
        let got = sha1(input).hex();
        ensure(got == expected && oracle_sha1(input) == expected, || {
            format!("reference vector of length {}: got {got}", input.len())
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut inputs: Vec<Vec<u8>> = (0..1000)
        .map(|_| {
            let len = rng.random_range(0..=200);
            (0..len).map(|_| rng.random()).collect()
        })
        .collect();
    for len in [55, 56, 63, 64, 119, 120] {
        inputs.push((0..len).map(|_| rng.random()).collect());
    }
    for input in &inputs {
        ensure(sha1(input).hex() == oracle_sha1(input), || {
            format!("mismatch on {} random bytes", input.len())
        })?;
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!("3 vectors + {} random/boundary inputs", inputs.len()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut small = 0;
    for i in 0..5000 {
        // cycle through every size so each gets a fair share
        let n = 1 + i % 7;
        check_against_oracles(&random_connected(&mut rng, n), 1e-9)?;
        small += 1;
    }
    let mut medium = 0;
    for _ in 0..200 {
        let n = rng.random_range(8..=12);
        check_against_oracles(&random_connected(&mut rng, n), 1e-9)?;
        medium += 1;
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "{small} connected graphs n<=7, {medium} with 8<=n<=12, tolerance 1e-9"
    ))
}

fn scenario_identity() -> Outcome {
    let karate = scenario_original(&karate_club()).map_err(|e| e.to_string())?;
    ensure(karate.verdict == Verdict::Match, || format!("karate: {karate}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..50 {
        let n = rng.random_range(2..=60u64);
        let max = (n * (n - 1) / 2) as usize;
        let g = random_graph(n, rng.random_range(0..=max.min(3 * n as usize)), seed);
        let r = scenario_original(&g).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Match, || {
            format!("false alarm on random graph seed {seed}: {r}")
        })?;
    }
    Ok("karate + 50 random graphs, 0 false alarms".into())
}

fn scenario_authorized_updates() -> Outcome {
    let karate = karate_club();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let graph_path = dir.path().join("karate.edges");
    let mut rejected = 0;
    for seed in 0..20u64 {
        let secret = format!("secret-{seed}");
        let authority = Authority::from_secret(&secret);
        let edits = random_edit_sequence(&karate, seed, 1 + seed as usize % 5).map_err(|e| e.to_string())?;

        let r = scenario_valid_modification(&karate, &edits, &secret, &authority).map_err(|e| e.to_string())?;
        ensure(r.is_match(), || format!("seed {seed}: verify after update gave {r}"))?;

        let stored = node_safe_hash(&karate).map_err(|e| e.to_string())?;
        let edited = apply_edits(&karate, &edits)
            .map_err(|e| e.to_string())?
            .expect("edits keep the network");
        ensure(
            matches!(
                update(&edited, &stored, "wrong", &authority),
                Err(LedgerError::Unauthorized)
            ),
            || format!("seed {seed}: wrong token accepted in memory"),
        )?;

        // on disk: a wrong token must not touch the ledger or its archives
        let store = LedgerStore::new(dir.path().join(format!("karate-{seed}.ledger")));
        fs::write(&graph_path, karate.to_edge_list_file()).map_err(|e| e.to_string())?;
        let eigen = Default::default();
        let init = run_cycle(&graph_path, &store, Some(&secret), eigen).map_err(|e| e.to_string())?;
        ensure(matches!(init, CycleStatus::Initialized { .. }), || {
            format!("seed {seed}: init gave {init:?}")
        })?;
        let before = fs::read(store.path()).map_err(|e| e.to_string())?;
        fs::write(&graph_path, edited.to_edge_list_file()).map_err(|e| e.to_string())?;
        let status = run_cycle(&graph_path, &store, Some("wrong"), eigen).map_err(|e| e.to_string())?;
        ensure(
            matches!(&status, CycleStatus::Alarm(r) if r.verdict == Verdict::Tampered),
            || format!("seed {seed}: wrong token gave {status:?}"),
        )?;
        let after = fs::read(store.path()).map_err(|e| e.to_string())?;
        ensure(
            before == after && store.archives().map_err(|e| e.to_string())?.is_empty(),
            || format!("seed {seed}: ledger changed after a rejected update"),
        )?;
        rejected += 1;

        let status = run_cycle(&graph_path, &store, Some(&secret), eigen).map_err(|e| e.to_string())?;
        ensure(matches!(status, CycleStatus::Updated { .. }), || {
            format!("seed {seed}: update gave {status:?}")
        })?;
        let status = run_cycle(&graph_path, &store, None, eigen).map_err(|e| e.to_string())?;
        ensure(status == CycleStatus::Ok, || {
            format!("seed {seed}: verify after update gave {status:?}")
        })?;
    }
    Ok(format!(
        "20 authorized sequences verified; {rejected} wrong-token attempts left the ledger byte-identical"
    ))
}

fn scenario_tampering() -> Outcome {
    let start = Instant::now();
    let g = karate_club();
    let deletions = deletion_sweep(&g).map_err(|e| e.to_string())?;
    let additions = addition_sweep(&g, 100, 5).map_err(|e| e.to_string())?;
    let nodes = node_deletion_sweep(&g).map_err(|e| e.to_string())?;
    let expect = |name: &str, s: &netseal::scenario::SweepResult, total: usize| {
        ensure(s.total_cases == total && s.detected == total, || {
            format!(
                "{name}: {}/{} detected, undetected {:?}",
                s.detected, s.total_cases, s.undetected_edits
            )
        })
    };
    expect("edge deletions", &deletions, 78)?;
    expect("edge additions", &additions, 100)?;
    expect("node deletions", &nodes, 34)?;
    let gone = scenario_tampered(&g, &[Edit::DeleteNetwork]).map_err(|e| e.to_string())?;
    ensure(gone.verdict == Verdict::Missing, || {
        format!("network deletion gave {gone}")
    })?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "{}/78 deletions, {}/100 additions, {}/34 node deletions, network deletion MISSING",
        deletions.detected, additions.detected, nodes.detected
    ))
}

fn localization() -> Outcome {
    let g = karate_club();
    let stored = node_safe_hash(&g).map_err(|e| e.to_string())?;
    let mut cases = 0;
    let mut edits: Vec<(NodeId, NodeId, Graph)> =
        g.edges().map(|(u, v)| (u, v, g.remove_edge(u, v).unwrap())).collect();
    let nodes: Vec<NodeId> = g.nodes().collect();
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            if !g.has_edge(u, v) {
                edits.push((u, v, g.add_edge(u, v).unwrap()));
            }
        }
    }
    for (u, v, edited) in edits {
        let r = tamper_check(&edited, &stored);
        ensure(r.affected_nodes.contains(&u) && r.affected_nodes.contains(&v), || {
            format!("edit ({u},{v}): affected {:?}", r.affected_nodes)
        })?;
        cases += 1;
    }
    Ok(format!(
        "{cases} single-edge edits (every deletion and addition) report both endpoints"
    ))
}

fn determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lines: Vec<&str> = karate_club_text().lines().collect();
    let mut digests = std::collections::BTreeSet::new();
    for _ in 0..20 {
        let mut shuffled: Vec<String> = lines
            .iter()
            .map(|l| {
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() == 2 && !l.starts_with('#') && rng.random_bool(0.5) {
                    format!("{} {}", parts[1], parts[0])
                } else {
                    l.to_string()
                }
            })
            .collect();
        shuffled.shuffle(&mut rng);
        let g = parse_edge_list(&shuffled.join("\n")).map_err(|e| e.to_string())?;
        digests.insert(node_safe_hash(&g).map_err(|e| e.to_string())?.global_digest.hex());
    }
    ensure(digests.len() == 1, || format!("{} distinct digests", digests.len()))?;
    let digest = digests.into_iter().next().unwrap();
    ensure(digest == KARATE_FINGERPRINT, || {
        format!("digest {digest} differs from the golden fingerprint")
    })?;
    Ok(format!("20 permutations -> {digest}"))
}

fn linear_comparison() -> Outcome {
    let rows = run_bench(&[1000, 2000, 4000, 8000], 8).map_err(|e| e.to_string())?;
    for line in render_table(&rows).lines() {
        println!("    {line}");
    }
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].compare_secs / w[0].compare_secs).collect();
    let shown = ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ");
    ensure(ratios.iter().all(|r| (1.5..=3.0).contains(r)), || {
        format!("comparison ratios {shown}")
    })?;
    Ok(format!(
        "comparison ratios {shown} (recompute is not linear; shown for contrast)"
    ))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let mut monotone_cases = 0;
    while monotone_cases < 500 {
        let n = rng.random_range(2..=15);
        let g = random_any(&mut rng, n);
        let non_edges: Vec<(NodeId, NodeId)> = g
            .nodes()
            .flat_map(|u| g.nodes().filter(move |&v| u < v).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        let Some(&(u, v)) = non_edges.choose(&mut rng) else {
            continue;
        };
        let before = harmonic_closeness(&g);
        let after = harmonic_closeness(&g.add_edge(u, v).unwrap());
        ensure(before.iter().all(|(w, c)| after[w] >= *c), || {
            format!(
                "closeness dropped after adding ({u},{v}) to\n{}",
                g.canonical_edge_list()
            )
        })?;
        monotone_cases += 1;
    }

    let mut corpus = vec![
        karate_club(),
        common::path(2),
        common::path(7),
        common::star(5),
        common::complete(6),
        common::cycle(9),
    ];
    corpus.extend((0..50).map(|seed| random_connected_graph(rng.random_range(2..=40), rng.random_range(0..60), seed)));
    let mut worst = (0.0f64, 0.0f64);
    for g in &corpus {
        let (residual, norm) = eigen_residual(g);
        ensure(residual <= 1e-8 && (norm - 1.0).abs() <= 1e-9, || {
            format!("residual {residual:e}, norm {norm} on\n{}", g.canonical_edge_list())
        })?;
        worst = (worst.0.max(residual), worst.1.max((norm - 1.0).abs()));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = LedgerStore::new(dir.path().join("karate.ledger"));
    let text = node_safe_hash(&karate_club())
        .map_err(|e| e.to_string())?
        .to_text()
        .into_bytes();
    ensure(Ledger::parse(std::str::from_utf8(&text).unwrap()).is_ok(), || {
        "intact ledger rejected".into()
    })?;
    let mut lengths = vec![text.len() - 1];
    while lengths.len() < 100 {
        lengths.push(rng.random_range(0..text.len()));
    }
    let mut failures = 0;
    for &len in &lengths {
        fs::write(store.path(), &text[..len]).map_err(|e| e.to_string())?;
        if store.load().is_err() {
            failures += 1;
        }
    }
    ensure(failures == lengths.len(), || {
        format!("{failures}/{} truncations rejected", lengths.len())
    })?;

    Ok(format!(
        "500 monotonicity cases, eigen residual <= {:.1e} and |norm-1| <= {:.1e} on {} graphs, {failures}/100 truncations rejected",
        worst.0,
        worst.1,
        corpus.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("sha1 correctness", sha1_correctness),
        ("centrality oracle equivalence", oracle_equivalence),
        ("identity verification", scenario_identity),
        ("authorized updates", scenario_authorized_updates),
        ("tamper detection", scenario_tampering),
        ("localization", localization),
        ("determinism", determinism),
        ("linear comparison", linear_comparison),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

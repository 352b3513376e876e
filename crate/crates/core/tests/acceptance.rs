//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use ossint::attrs::{top_k_accuracy, AttributeRates, FriendRecord};
use ossint::eval::{analyze_victim, labeled_candidates, metrics, render_summary, ExperimentConfig};
use ossint::fixtures::{reference_candidates, reference_rates, reference_snapshot, CANDIDATES, REFERENCE_CONFUSION, VICTIM};
use ossint::model::AttributeTriple;
use ossint::rational::to_f64;
use ossint::run::{execute, RunConfig, SnapshotSource, ThresholdSource};
use ossint::scoring::{calibrate, score_pool};
use ossint::socialspy::socialspy_s4;
use ossint::twohop::{build_graph, collect_2hop, prune_single_edge};
use ossint::{generate_synthetic, Feature, GeneratorConfig, Label, OracleHandle, OsnSnapshot, Rational, UserId};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const INFO_TOLERANCE: f64 = 0.001;
const METRIC_TOLERANCE: f64 = 0.0005;
const SCORING_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const EXPERIMENT_BUDGET: Duration = Duration::from_secs(120);
const CORPUS_SNAPSHOTS: u64 = 100;
const CORPUS_MAX_USERS: usize = 50;
const PROPERTY_CASES: u32 = 1000;
const CALIBRATION_MAX_CANDIDATES: usize = 500;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn id(s: &str) -> UserId {
    UserId::new(s).unwrap()
}

/// Users 10..=50, all with public pictures, friends always engage.
fn corpus(p_stranger: f64) -> impl Iterator<Item = OsnSnapshot> {
    (0..CORPUS_SNAPSHOTS).map(move |seed| {
        let users = 10 + (seed as usize * 7) % (CORPUS_MAX_USERS - 9);
        generate_synthetic(&complete_config(users, p_stranger), seed).unwrap()
    })
}

fn scoring_reproduction() -> Check {
    let start = Instant::now();
    let expected_info = [(0, 0.266), (2, 0.010), (3, 0.033)];
    let expected_edge = [Rational::new(4, 5), Rational::new(3, 10), Rational::from_integer(1), Rational::new(1, 5)];

    let pool = score_pool(&reference_candidates(), &reference_rates());
    let snapshot = reference_snapshot();
    let outcome = analyze_victim(&snapshot, &id(VICTIM), None, &ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let analysed = outcome.analysis().ok_or("reference victim skipped")?;
    ensure(analysed.scores == pool, || "snapshot pipeline and scoring fixture disagree".into())?;
    ensure(analysed.scores.len() == CANDIDATES.len(), || format!("{} candidates scored", analysed.scores.len()))?;

    for (row, want) in expected_info {
        let got = to_f64(&pool[row].info_score);
        ensure((got - want).abs() <= INFO_TOLERANCE, || format!("row {} info {got:.4} vs {want}", row + 1))?;
    }
    let edges: Vec<_> = pool.iter().map(|s| s.edge_score).collect();
    ensure(edges == expected_edge, || format!("edge scores {edges:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < SCORING_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "info {:.4}/{:.4}/{:.4}, edges 4/5 3/10 1 1/5, row 2 excluded (info {}), {elapsed:.0?}",
        to_f64(&pool[0].info_score),
        to_f64(&pool[2].info_score),
        to_f64(&pool[3].info_score),
        pool[1].info_score
    ))
}

fn metrics_reproduction() -> Check {
    let m = metrics(&REFERENCE_CONFUSION);
    let mut parts = Vec::new();
    for (name, got, want) in [
        ("precision", m.precision, 0.0853),
        ("recall", m.recall, 0.2821),
        ("f1", m.f1, 0.1310),
    ] {
        let got = to_f64(&got.ok_or_else(|| format!("{name} undefined"))?);
        ensure((got - want).abs() <= METRIC_TOLERANCE, || format!("{name} {got:.5} vs {want}"))?;
        parts.push(format!("{name} {got:.4}"));
    }
    Ok(parts.join(", "))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let (mut pairs, mut nodes, mut mismatches) = (0u64, 0u64, 0u64);
    for s in corpus(0.05) {
        let adj = adjacency(&s);
        let oracle = OracleHandle::new(&s);
        for a in s.user_ids() {
            for b in s.user_ids().filter(|b| *b > a) {
                pairs += 1;
                if oracle.mutual_friends(a, b).unwrap() != brute_mutual(&adj, a, b) {
                    mismatches += 1;
                }
            }
        }
        for v in s.user_ids() {
            let g = build_graph(v, &collect_2hop(v, &oracle).unwrap()).unwrap();
            let expected = brute_two_hop(&adj, v);
            let two_hop: BTreeSet<_> = g.two_hop().cloned().collect();
            if two_hop != expected.keys().cloned().collect() {
                mismatches += 1;
            }
            for (c, n) in &expected {
                nodes += 1;
                if g.shared_edge_count(c).ok() != Some(*n) {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    ensure(elapsed < ORACLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{CORPUS_SNAPSHOTS} snapshots, {pairs} pairs, {nodes} 2-hop counts, 0 mismatches, {elapsed:.1?}"))
}

fn graph_sound(s: &OsnSnapshot, v: &UserId) -> Result<(), String> {
    let oracle = OracleHandle::new(s);
    let found = socialspy_s4(v, &oracle).map_err(|e| e.to_string())?;
    let g = build_graph(v, &collect_2hop(v, &oracle).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    for (a, b) in g.edges() {
        ensure(s.are_friends(&a, &b), || format!("false edge {a}-{b}"))?;
    }
    for f in &found.friends {
        ensure(g.has_edge(v, f) && s.are_friends(v, f), || format!("1-hop {f} not adjacent to {v}"))?;
    }
    let once = prune_single_edge(&g);
    ensure(prune_single_edge(&once) == once, || format!("pruning not idempotent for {v}"))
}

fn graph_soundness() -> Check {
    let mut victims = 0;
    for s in corpus(0.05) {
        for v in s.user_ids() {
            graph_sound(&s, v)?;
            victims += 1;
        }
    }
    let strategy = (3usize..=CORPUS_MAX_USERS, any::<u64>(), 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=0.3f64, any::<prop::sample::Index>());
    runner(PROPERTY_CASES)
        .run(&strategy, |(users, seed, p_friend, picture_public, p_stranger, pick)| {
            let cfg = GeneratorConfig {
                users,
                mean_degree: 6.0,
                p_friend,
                picture_public,
                p_stranger,
                ..GeneratorConfig::default()
            };
            let s = generate_synthetic(&cfg, seed).unwrap();
            let v = s.user_ids().nth(pick.index(users)).unwrap().clone();
            graph_sound(&s, &v).map_err(TestCaseError::fail)
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{victims} corpus victims and {PROPERTY_CASES} generated cases sound"))
}

fn socialspy_soundness() -> Check {
    let mut exact = 0;
    for s in corpus(0.0) {
        for v in s.user_ids() {
            let found = socialspy_s4(v, &OracleHandle::new(&s)).map_err(|e| e.to_string())?;
            let engaged = engaged_friends(&s, v);
            ensure(found.friends == engaged, || format!("{v}: recovered != engaged friends"))?;
            ensure(&engaged == s.friends_of(v), || format!("{v}: not every friend engaged"))?;
            exact += 1;
        }
    }
    let mut strangers = 0;
    for (i, s) in corpus(0.2).enumerate() {
        for v in s.user_ids() {
            let found = socialspy_s4(v, &OracleHandle::new(&s)).map_err(|e| e.to_string())?;
            let fp = found.friends.iter().filter(|f| !s.are_friends(v, f)).count();
            ensure(fp == 0, || format!("snapshot {i} victim {v}: {fp} false positives"))?;
            strangers += found.candidates_checked - found.friends.len();
        }
    }
    ensure(strangers > 0, || "stranger corpus produced no stranger engagement".into())?;
    Ok(format!("{exact} victims recovered exactly; {strangers} strangers rejected, 0 false positives"))
}

fn rate_invariants() -> Check {
    let labels = ["Padua", "Rome", "Venice", "Turin", "Milan"];
    let field = || proptest::option::of(0..labels.len());
    let friend = (field(), field(), field(), any::<bool>());
    runner(PROPERTY_CASES)
        .run(&proptest::collection::vec(friend, 1..60), |friends| {
            let records: Vec<FriendRecord> = friends
                .iter()
                .enumerate()
                .map(|(i, (e, h, c, public))| {
                    let l = |x: &Option<usize>| x.filter(|_| *public).map(|i| Label::new(labels[i]).unwrap());
                    FriendRecord {
                        source: UserId::new(format!("f{i}")).unwrap(),
                        public: *public,
                        attributes: AttributeTriple { education: l(e), hometown: l(h), current_city: l(c) },
                    }
                })
                .collect();
            let rates = AttributeRates::from_records(&records, &UserId::from_static("v")).unwrap();
            let m = records.len() as u64;
            for f in Feature::ALL {
                let visible = records.iter().filter(|r| r.attributes.get(f).is_some()).count() as u64;
                let sum: Rational = rates.table(f).values().copied().sum();
                prop_assert_eq!(sum, Rational::new(visible, m));
                prop_assert_eq!(rates.mass(f), sum);
                prop_assert!(sum <= Rational::from_integer(1));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let cases = four_victims();
    let top1 = top_k_accuracy(&cases, 1).map_err(|e| e.to_string())?;
    let top2 = top_k_accuracy(&cases, 2).map_err(|e| e.to_string())?;
    let hand = BTreeMap::from([
        (Feature::Hometown, (Some(Rational::new(1, 4)), Some(Rational::new(1, 2)))),
        (Feature::Education, (Some(Rational::new(2, 3)), Some(Rational::from_integer(0)))),
        (Feature::CurrentCity, (None, None)),
    ]);
    for (f, (t1, t2)) in hand {
        ensure(top1[&f] == t1 && top2[&f] == t2, || format!("{} top-k {:?}/{:?}", f.name(), top1[&f], top2[&f]))?;
    }
    Ok(format!("{PROPERTY_CASES} rate cases exact; 4-victim top-1/top-2 match hand counts"))
}

fn calibration_optimality() -> Check {
    let info = (0u64..=30).prop_map(|n| Rational::new(n, 30));
    let edge = (0u64..=12).prop_map(|n| Rational::new(n, 12));
    let strategy = proptest::collection::vec((info, edge, any::<bool>()), 1..=CALIBRATION_MAX_CANDIDATES);
    runner(200)
        .run(&strategy, |rows| {
            let mut labeled: Vec<_> = rows.iter().enumerate().map(|(i, (a, b, t))| (score(i, *a, *b), *t)).collect();
            labeled[0].1 = true;
            let cal = calibrate(&labeled).unwrap();
            let best = exhaustive_best_f1(&labeled);
            prop_assert_eq!(cal.f1, best);
            prop_assert_eq!(f1_at(&labeled, cal.thresholds.best_info, cal.thresholds.best_edges), best);
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let s = generate_synthetic(&GeneratorConfig { users: 120, ..GeneratorConfig::default() }, 5).unwrap();
    let mut labeled = Vec::new();
    for v in s.user_ids().take(8) {
        if let Some(a) = analyze_victim(&s, v, None, &ExperimentConfig::default()).unwrap().analysis() {
            labeled.extend(labeled_candidates(&s, a));
        }
    }
    let cal = calibrate(&labeled).map_err(|e| e.to_string())?;
    let best = exhaustive_best_f1(&labeled);
    ensure(cal.f1 == best, || format!("synthetic corpus f1 {} vs sweep {best}", cal.f1))?;
    Ok(format!("200 random corpora (<= {CALIBRATION_MAX_CANDIDATES}) and {} synthetic candidates: F1 equals sweep maximum", labeled.len()))
}

fn visible_victims(s: &OsnSnapshot) -> Vec<UserId> {
    s.user_ids().filter(|v| !engaged_friends(s, v).is_empty()).cloned().collect()
}

fn experiment_config(out: &Path, params: &GeneratorConfig, seed: u64, victims: &[UserId], calibration: &[UserId]) -> RunConfig {
    RunConfig {
        snapshot: SnapshotSource::Generate { params: params.clone(), seed },
        victims: victims.to_vec(),
        thresholds: ThresholdSource::Calibrate { victims: calibration.to_vec() },
        out_dir: out.to_path_buf(),
        experiment: ExperimentConfig { jobs: 4, ..ExperimentConfig::default() },
    }
}

fn files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Check {
    let params = GeneratorConfig { users: 80, ..GeneratorConfig::default() };
    let s = generate_synthetic(&params, 21).unwrap();
    let visible = visible_victims(&s);
    ensure(visible.len() >= 8, || "too few visible victims".into())?;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        execute(&experiment_config(dir.path(), &params, 21, &visible[..4], &visible[4..8])).map_err(|e| e.to_string())?;
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    ensure(fa == fb, || "artifacts differ between runs".into())?;
    let dots = fa.keys().filter(|k| k.ends_with(".dot")).count();
    let reports = fa.keys().filter(|k| k.ends_with(".json")).count();
    ensure(dots > 0 && reports > 0, || "no artifacts written".into())?;
    Ok(format!("{} files byte-identical ({dots} DOT, {reports} JSON)", fa.len()))
}

fn end_to_end() -> Check {
    let start = Instant::now();
    let params = GeneratorConfig { users: 200, ..GeneratorConfig::default() };
    let s = generate_synthetic(&params, 42).unwrap();
    let visible = visible_victims(&s);
    ensure(visible.len() >= 16, || "too few visible victims".into())?;
    let out = tempfile::tempdir().unwrap();
    let exp = execute(&experiment_config(out.path(), &params, 42, &visible[..8], &visible[8..16])).map_err(|e| e.to_string())?;
    let report = &exp.report;

    ensure(report.victims.len() == 8, || format!("{} victims", report.victims.len()))?;
    for v in &report.victims {
        ensure(v.confusion.is_some(), || format!("{} has no confusion matrix ({})", v.victim, v.status))?;
        ensure(out.path().join(&v.victim).join("graph.dot").is_file(), || format!("{} has no DOT", v.victim))?;
    }
    let agg = &report.aggregate;
    ensure(agg.mean_confusion.is_some() && agg.mean_confusion_rounded.is_some(), || "aggregate matrix missing".into())?;
    let acc = agg.attribute_accuracy.as_ref().ok_or("accuracy table missing")?;
    ensure(acc.top1.len() == 3 && acc.top2.len() == 3, || "accuracy table incomplete".into())?;
    let summary = render_summary(report);
    for heading in ["average confusion matrix", "TOP 1", "TOP 2", "Current City", "Hometown", "Education"] {
        ensure(summary.contains(heading), || format!("summary lacks {heading:?}"))?;
    }
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.path().join("aggregate.json")).unwrap()).unwrap();
    ensure(json["aggregate"]["mean_confusion"]["tn"].is_string(), || "aggregate.json lacks rational mean".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < EXPERIMENT_BUDGET, || format!("took {elapsed:?}"))?;
    let m = agg.mean_confusion_rounded.unwrap();
    Ok(format!("8 victims, mean matrix tn {} fp {} fn {} tp {}, {elapsed:.1?}", m.tn, m.fp, m.fn_, m.tp))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("scoring reproduction", scoring_reproduction),
        ("metrics reproduction", metrics_reproduction),
        ("oracle equivalence", oracle_equivalence),
        ("graph soundness", graph_soundness),
        ("friend recovery soundness and recall", socialspy_soundness),
        ("attribute-rate invariants", rate_invariants),
        ("calibration optimality", calibration_optimality),
        ("determinism", determinism),
        ("end-to-end experiment", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

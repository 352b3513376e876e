mod common;

use std::collections::BTreeSet;

use common::*;
use ossint::fixtures::{reference_snapshot, CANDIDATES, SINGLE_EDGE_CANDIDATE, VICTIM};
use ossint::generate::ingest_edge_list;
use ossint::scoring::score_candidates;
use ossint::socialspy::socialspy_s4;
use ossint::twohop::{build_graph, collect_2hop, prune_single_edge, Role};
use ossint::{attrs, generate_synthetic, GeneratorConfig, OracleHandle, UserId};

fn id(s: &str) -> UserId {
    UserId::new(s).unwrap()
}

#[test]
fn are_friends_matches_adjacency_on_ten_nodes() {
    let s = generate_synthetic(&GeneratorConfig { users: 10, mean_degree: 4.0, ..Default::default() }, 5).unwrap();
    let adj = adjacency(&s);
    let oracle = OracleHandle::new(&s);
    for a in s.user_ids() {
        for b in s.user_ids().filter(|b| *b != a) {
            assert_eq!(oracle.are_friends(a, b).unwrap(), adj[a].contains(b), "{a} {b}");
        }
    }
}

#[test]
fn mutual_friends_matches_brute_force_on_thirty_nodes() {
    let s = generate_synthetic(&GeneratorConfig { users: 30, ..Default::default() }, 9).unwrap();
    let adj = adjacency(&s);
    let oracle = OracleHandle::new(&s);
    for a in s.user_ids() {
        for b in s.user_ids().filter(|b| *b != a) {
            let got = oracle.mutual_friends(a, b).unwrap();
            assert_eq!(got, brute_mutual(&adj, a, b));
            assert!(!got.contains(a) && !got.contains(b));
            assert_eq!(got, oracle.mutual_friends(b, a).unwrap());
        }
    }
}

#[test]
fn fixture_public_picture_counts_in_observed_range() {
    let s = reference_snapshot();
    let oracle = OracleHandle::new(&s);
    for u in s.user_ids() {
        let n = oracle.public_pictures_of(u).unwrap().len();
        assert!((1..=13).contains(&n), "{u} has {n} public pictures");
    }
    assert_eq!(oracle.public_pictures_of(&id(VICTIM)).unwrap().len(), 5);
}

#[test]
fn socialspy_rejects_strangers_on_fifty_nodes() {
    let s = generate_synthetic(&complete_config(50, 0.2), 21).unwrap();
    let oracle = OracleHandle::new(&s);
    let mut strangers_seen = 0;
    for v in s.user_ids() {
        let found = socialspy_s4(v, &oracle).unwrap();
        assert_eq!(found.friends, engaged_friends(&s, v), "victim {v}");
        assert_eq!(&found.friends, s.friends_of(v));
        strangers_seen += found.candidates_checked - found.friends.len();
    }
    assert!(strangers_seen > 0, "p_stranger=0.2 should produce stranger engagement");
}

#[test]
fn socialspy_verification_calls_equal_candidates() {
    let s = generate_synthetic(&complete_config(30, 0.3), 4).unwrap();
    for v in s.user_ids() {
        let oracle = OracleHandle::new(&s);
        let found = socialspy_s4(v, &oracle).unwrap();
        // One picture listing plus one MCP check per candidate.
        assert_eq!(oracle.queries(), 1 + found.candidates_checked as u64);
    }
}

#[test]
fn path_graph_collects_one_empty_pair() {
    let cfg = GeneratorConfig {
        pictures_min: 1,
        pictures_max: 1,
        picture_public: 1.0,
        p_friend: 1.0,
        p_stranger: 0.0,
        ..Default::default()
    };
    let s = ingest_edge_list("V A\nA B\n", None, &cfg, 3).unwrap();
    let oracle = OracleHandle::new(&s);
    let map = collect_2hop(&id("V"), &oracle).unwrap();
    let entries: Vec<_> = map.entries().map(|((a, b), m)| (a.clone(), b.clone(), m.clone())).collect();
    assert_eq!(entries, vec![(id("A"), id("B"), BTreeSet::new())]);

    let g = build_graph(&id("V"), &map).unwrap();
    assert_eq!(g.role(&id("B")), Some(Role::TwoHopSingleEdge));
    assert!(prune_single_edge(&g).role(&id("B")).is_none());
}

#[test]
fn collected_mutuals_and_graph_on_forty_nodes() {
    let s = complete_snapshot(40, 13);
    let adj = adjacency(&s);
    let truth = s.edges();
    for v in s.user_ids().take(10) {
        let oracle = OracleHandle::new(&s);
        let map = collect_2hop(v, &oracle).unwrap();
        for ((a, b), m) in map.entries() {
            assert_eq!(m, &brute_mutual(&adj, a, b));
        }
        let g = build_graph(v, &map).unwrap();
        for (a, b) in g.edges() {
            assert!(truth.contains(&(a.clone(), b.clone())) || truth.contains(&(b, a)));
        }
        for f in s.friends_of(v) {
            assert!(g.has_edge(v, f), "missing victim edge to {f}");
        }
        let expected = brute_two_hop(&adj, v);
        let two_hop: BTreeSet<_> = g.two_hop().cloned().collect();
        assert_eq!(two_hop, expected.keys().cloned().collect());
        for (c, n) in &expected {
            assert_eq!(g.shared_edge_count(c).unwrap(), *n);
        }
    }
}

#[test]
fn candidate_shared_edges_match_brute_force() {
    let s = complete_snapshot(40, 17);
    let adj = adjacency(&s);
    for v in s.user_ids().take(10) {
        let oracle = OracleHandle::new(&s);
        let found = socialspy_s4(v, &oracle).unwrap();
        if found.friends.is_empty() {
            continue;
        }
        let g = build_graph(v, &collect_2hop(v, &oracle).unwrap()).unwrap();
        let rates = attrs::extract_rates(&found, &oracle).unwrap();
        for sc in score_candidates(&g, &rates, &oracle).unwrap() {
            let brute = adj[&sc.candidate].intersection(&found.friends).count();
            assert_eq!(sc.shared_edges, brute);
        }
    }
}

#[test]
fn reference_fixture_graph() {
    let s = reference_snapshot();
    let v = id(VICTIM);
    let oracle = OracleHandle::new(&s);
    let g = build_graph(&v, &collect_2hop(&v, &oracle).unwrap()).unwrap();
    for (c, .., shared) in CANDIDATES {
        assert_eq!(g.shared_edge_count(&id(c)).unwrap(), shared);
        assert_eq!(g.role(&id(c)), Some(Role::TwoHopRelevant));
    }
    assert_eq!(g.single_edge_ids(), vec![id(SINGLE_EDGE_CANDIDATE)]);
    let pruned = prune_single_edge(&g);
    assert!(pruned.role(&id(SINGLE_EDGE_CANDIDATE)).is_none());
    assert!(pruned.role(&id("2-hop_ID-4")).is_some());
    let dot = g.to_dot();
    assert!(dot.contains(&format!("\"{SINGLE_EDGE_CANDIDATE}\" [fillcolor=grey")));
}

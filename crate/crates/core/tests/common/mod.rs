#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ossint::attrs::{rank_guesses, AttributeRates, FriendRecord, VictimGuesses};
use ossint::model::AttributeTriple;
use ossint::scoring::{CandidateScore, Thresholds};
use ossint::{generate_synthetic, GeneratorConfig, Label, OsnSnapshot, Rational, UserId};

/// Every user has a public picture and every friend engages with it, so
/// recovery sees the full friend set.
pub fn complete_config(users: usize, p_stranger: f64) -> GeneratorConfig {
    GeneratorConfig {
        users,
        mean_degree: (users as f64 / 4.0).max(2.0),
        pictures_min: 1,
        pictures_max: 2,
        picture_public: 1.0,
        p_friend: 1.0,
        p_stranger,
        ..GeneratorConfig::default()
    }
}

pub fn complete_snapshot(users: usize, seed: u64) -> OsnSnapshot {
    generate_synthetic(&complete_config(users, 0.05), seed).expect("valid config")
}

/// Adjacency rebuilt from the undirected edge list alone.
pub fn adjacency(s: &OsnSnapshot) -> BTreeMap<UserId, BTreeSet<UserId>> {
    let mut adj: BTreeMap<UserId, BTreeSet<UserId>> =
        s.user_ids().map(|u| (u.clone(), BTreeSet::new())).collect();
    for (a, b) in s.edges() {
        adj.get_mut(&a).unwrap().insert(b.clone());
        adj.get_mut(&b).unwrap().insert(a);
    }
    adj
}

pub fn brute_mutual(adj: &BTreeMap<UserId, BTreeSet<UserId>>, a: &UserId, b: &UserId) -> BTreeSet<UserId> {
    adj.keys()
        .filter(|w| adj[a].contains(*w) && adj[b].contains(*w))
        .cloned()
        .collect()
}

/// Ground-truth 2-hop ids of `v` with the number of `v`'s friends each is
/// adjacent to.
pub fn brute_two_hop(adj: &BTreeMap<UserId, BTreeSet<UserId>>, v: &UserId) -> BTreeMap<UserId, usize> {
    let mut out = BTreeMap::new();
    for (c, neighbours) in adj {
        if c == v || adj[v].contains(c) {
            continue;
        }
        let shared = neighbours.iter().filter(|n| adj[v].contains(*n)).count();
        if shared > 0 {
            out.insert(c.clone(), shared);
        }
    }
    out
}

/// Friends of `v` who liked or commented one of `v`'s public pictures.
pub fn engaged_friends(s: &OsnSnapshot, v: &UserId) -> BTreeSet<UserId> {
    let adj = adjacency(s);
    s.pictures()
        .filter(|p| &p.owner == v && p.public)
        .flat_map(|p| p.likers.iter().chain(&p.commenters))
        .filter(|u| adj[v].contains(*u))
        .cloned()
        .collect()
}

pub fn has_public_picture(s: &OsnSnapshot, v: &UserId) -> bool {
    s.pictures().any(|p| &p.owner == v && p.public)
}

pub fn score(candidate: usize, info: Rational, edge: Rational) -> CandidateScore {
    CandidateScore {
        candidate: UserId::new(format!("c{candidate}")).unwrap(),
        info_score: info,
        shared_edges: 0,
        edge_score: edge,
        combined: (info + edge) / Rational::from_integer(2),
        verdict: None,
    }
}

/// F1 of the rule `info >= ti && edge >= te`, counted directly.
pub fn f1_at(labeled: &[(CandidateScore, bool)], ti: Rational, te: Rational) -> Rational {
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (s, friend) in labeled {
        let predicted = s.info_score >= ti && s.edge_score >= te;
        match (predicted, *friend) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    if tp == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(2 * tp, 2 * tp + fp + fn_)
    }
}

/// Best F1 over every pair of observed values, plus 0 and 1 on each axis.
pub fn exhaustive_best_f1(labeled: &[(CandidateScore, bool)]) -> Rational {
    let bounds = [Rational::from_integer(0), Rational::from_integer(1)];
    let info: BTreeSet<Rational> = labeled.iter().map(|(s, _)| s.info_score).chain(bounds).collect();
    let edge: BTreeSet<Rational> = labeled.iter().map(|(s, _)| s.edge_score).chain(bounds).collect();
    let mut best = Rational::from_integer(0);
    for ti in &info {
        for te in &edge {
            best = best.max(f1_at(labeled, *ti, *te));
        }
    }
    best
}

pub fn thresholds(info: Rational, edge: Rational) -> Thresholds {
    Thresholds::new(info, edge).unwrap()
}

fn label(s: &str) -> Label {
    Label::new(s).unwrap()
}

fn hand_records(education: &[&str], hometown: &[&str]) -> Vec<FriendRecord> {
    let n = education.len().max(hometown.len()).max(1);
    (0..n)
        .map(|i| FriendRecord {
            source: UserId::new(format!("f{i}")).unwrap(),
            public: true,
            attributes: AttributeTriple {
                education: education.get(i).map(|s| label(s)),
                hometown: hometown.get(i).map(|s| label(s)),
                current_city: None,
            },
        })
        .collect()
}

pub fn case(education: &[&str], hometown: &[&str], truth_edu: Option<&str>, truth_home: Option<&str>) -> VictimGuesses {
    let rates = AttributeRates::from_records(&hand_records(education, hometown), &UserId::from_static("v")).unwrap();
    VictimGuesses {
        guesses: rank_guesses(&rates),
        truth: AttributeTriple {
            education: truth_edu.map(label),
            hometown: truth_home.map(label),
            current_city: None,
        },
    }
}

/// Hand ranks: hometown 1, 2, unranked, 2 (tie broken by label);
/// education 1, unranked, no truth, 1 (tie broken by label).
pub fn four_victims() -> Vec<VictimGuesses> {
    vec![
        case(&["Padua", "Padua"], &["Rome", "Rome", "Rome", "Padua"], Some("Padua"), Some("Rome")),
        case(&[], &["Padua", "Padua", "Venice"], Some("Padua"), Some("Venice")),
        case(&["Milan"], &["Milan"], None, Some("Turin")),
        case(&["Venice", "Padua"], &["Bologna", "Bologna", "Rome", "Rome"], Some("Padua"), Some("Rome")),
    ]
}

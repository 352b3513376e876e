//! Likelihood scoring of 2-hop candidates and the two-threshold FRIEND rule.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attrs::AttributeRates;
use crate::error::{Error, Result};
use crate::model::{AttributeTriple, Feature, UserId};
use crate::oracle::OracleHandle;
use crate::rational::{self, Rational};
use crate::twohop::FriendshipGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Friend,
    NotFriend,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Friend => "FRIEND",
            Verdict::NotFriend => "NOT_FRIEND",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateScore {
    pub candidate: UserId,
    pub info_score: Rational,
    /// Recovered friends of the victim adjacent to the candidate.
    pub shared_edges: usize,
    /// `shared_edges` over the pool maximum.
    pub edge_score: Rational,
    /// Mean of `info_score` and `edge_score`; reported, not used for the verdict.
    pub combined: Rational,
    /// `None` until [`classify`] runs.
    pub verdict: Option<Verdict>,
}

/// Flat wire form shared by the CSV and JSON score tables.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreRow {
    pub candidate: String,
    pub info_score: f64,
    pub info_score_exact: String,
    pub shared_edges: usize,
    pub edge_score: f64,
    pub edge_score_exact: String,
    pub combined: f64,
    pub combined_exact: String,
    pub verdict: String,
}

impl From<&CandidateScore> for ScoreRow {
    fn from(s: &CandidateScore) -> Self {
        ScoreRow {
            candidate: s.candidate.to_string(),
            info_score: rational::to_f64(&s.info_score),
            info_score_exact: rational::format(&s.info_score),
            shared_edges: s.shared_edges,
            edge_score: rational::to_f64(&s.edge_score),
            edge_score_exact: rational::format(&s.edge_score),
            combined: rational::to_f64(&s.combined),
            combined_exact: rational::format(&s.combined),
            verdict: s.verdict.map(|v| v.to_string()).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    #[serde(with = "rational::serde_exact")]
    pub best_info: Rational,
    #[serde(with = "rational::serde_exact")]
    pub best_edges: Rational,
}

impl Thresholds {
    pub fn new(best_info: Rational, best_edges: Rational) -> Result<Self> {
        let one = Rational::from_integer(1);
        if best_info > one || best_edges > one {
            return Err(Error::InvalidThreshold(format!(
                "thresholds must lie in [0, 1], got ({}, {})",
                rational::format(&best_info),
                rational::format(&best_edges)
            )));
        }
        Ok(Self {
            best_info,
            best_edges,
        })
    }

    pub fn admits(&self, info: &Rational, edge: &Rational) -> bool {
        *info >= self.best_info && *edge >= self.best_edges
    }
}

/// Sum of the rates matching the candidate's visible attributes, divided by
/// three. Hidden or unmatched attributes contribute nothing.
pub fn info_score(attrs: Option<&AttributeTriple>, rates: &AttributeRates) -> Rational {
    let Some(attrs) = attrs else {
        return Rational::from_integer(0);
    };
    let sum = Feature::ALL
        .iter()
        .filter_map(|&f| attrs.get(f).map(|label| rates.rate(f, label)))
        .fold(Rational::from_integer(0), |acc, r| acc + r);
    sum / 3
}

/// What scoring needs to know about one candidate.
#[derive(Debug, Clone)]
pub struct CandidateInput {
    pub candidate: UserId,
    pub attributes: Option<AttributeTriple>,
    pub shared_edges: usize,
}

/// Scores a candidate pool. The edge score is normalized by the pool's
/// largest shared-edge count; a pool where that maximum is 0 gets edge score
/// 0 throughout. Output is sorted by candidate id.
pub fn score_pool(inputs: &[CandidateInput], rates: &AttributeRates) -> Vec<CandidateScore> {
    let max = inputs.iter().map(|c| c.shared_edges).max().unwrap_or(0) as u64;
    let mut out: Vec<CandidateScore> = inputs
        .iter()
        .map(|c| {
            let info = info_score(c.attributes.as_ref(), rates);
            let edge = if max == 0 {
                Rational::from_integer(0)
            } else {
                Rational::new(c.shared_edges as u64, max)
            };
            CandidateScore {
                candidate: c.candidate.clone(),
                info_score: info,
                shared_edges: c.shared_edges,
                edge_score: edge,
                combined: (info + edge) / 2,
                verdict: None,
            }
        })
        .collect();
    out.sort_by(|a, b| a.candidate.cmp(&b.candidate));
    out
}

/// Scores every 2-hop node of `g`, i.e. every node that is neither the
/// victim nor one of its recovered friends.
pub fn score_candidates(
    g: &FriendshipGraph,
    rates: &AttributeRates,
    oracle: &OracleHandle<'_>,
) -> Result<Vec<CandidateScore>> {
    let pool: BTreeSet<&UserId> = g.two_hop().collect();
    let inputs = pool
        .into_iter()
        .map(|c| {
            Ok(CandidateInput {
                candidate: c.clone(),
                attributes: oracle.public_attributes_of(c)?,
                shared_edges: g.shared_edge_count(c)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(score_pool(&inputs, rates))
}

/// FRIEND iff both scores meet their threshold.
pub fn classify(scores: &[CandidateScore], t: &Thresholds) -> Vec<CandidateScore> {
    scores
        .iter()
        .map(|s| CandidateScore {
            verdict: Some(if t.admits(&s.info_score, &s.edge_score) {
                Verdict::Friend
            } else {
                Verdict::NotFriend
            }),
            ..s.clone()
        })
        .collect()
}

/// Outcome of a calibration sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Calibration {
    pub thresholds: Thresholds,
    #[serde(with = "rational::serde_exact")]
    pub f1: Rational,
    #[serde(with = "rational::serde_exact")]
    pub precision: Rational,
}

/// F1 of a prediction count, exact: `2tp / (2tp + fp + fn)`.
pub fn f1_of(tp: u64, fp: u64, fn_: u64) -> Rational {
    if tp == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(2 * tp, 2 * tp + fp + fn_)
    }
}

fn precision_of(tp: u64, fp: u64) -> Rational {
    if tp + fp == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(tp, tp + fp)
    }
}

/// Picks the threshold pair, among observed score values, that maximizes F1
/// of the two-threshold rule. Ties go to higher precision, then higher info
/// threshold, then higher edge threshold.
pub fn calibrate(labeled: &[(CandidateScore, bool)]) -> Result<Calibration> {
    let positives = labeled.iter().filter(|(_, t)| *t).count() as u64;
    if positives == 0 {
        return Err(Error::NoPositives);
    }
    let info_values: BTreeSet<Rational> = labeled.iter().map(|(s, _)| s.info_score).collect();
    let edge_values: Vec<Rational> = labeled
        .iter()
        .map(|(s, _)| s.edge_score)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .rev()
        .collect();

    let mut best: Option<(Rational, Rational, Rational, Rational)> = None;
    for ti in info_values {
        // Candidates passing the info threshold, by edge score descending.
        let mut passing: Vec<(Rational, bool)> = labeled
            .iter()
            .filter(|(s, _)| s.info_score >= ti)
            .map(|(s, t)| (s.edge_score, *t))
            .collect();
        passing.sort_by_key(|(edge, _)| std::cmp::Reverse(*edge));

        let (mut tp, mut fp, mut idx) = (0u64, 0u64, 0usize);
        for te in &edge_values {
            while idx < passing.len() && passing[idx].0 >= *te {
                if passing[idx].1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
                idx += 1;
            }
            let key = (f1_of(tp, fp, positives - tp), precision_of(tp, fp), ti, *te);
            if best.is_none_or(|b| key > b) {
                best = Some(key);
            }
        }
    }
    let (f1, precision, best_info, best_edges) = best.expect("at least one labeled candidate");
    Ok(Calibration {
        thresholds: Thresholds::new(best_info, best_edges)?,
        f1,
        precision,
    })
}

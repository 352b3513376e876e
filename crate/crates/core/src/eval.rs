//! Evaluation against ground truth: confusion matrices, precision, recall
//! and F1, and the full per-victim experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attrs::{
    collect_friend_records, rank_guesses, top_k_accuracy, top_k_cumulative_accuracy,
    AttributeRates, FriendRecord, RankedGuess, VictimGuesses,
};
use crate::error::{Error, Result};
use crate::model::{AttributeTriple, Feature, OsnSnapshot, UserId};
use crate::oracle::OracleHandle;
use crate::rational::{self, Rational};
use crate::scoring::{classify, score_candidates, CandidateScore, ScoreRow, Thresholds, Verdict};
use crate::socialspy::{socialspy_s4, FriendsFound};
use crate::twohop::{build_graph, collect_2hop_from, prune_single_edge, FriendshipGraph, MutualFriendMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tp: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tn + self.fp + self.fn_ + self.tp
    }

    pub fn record(&mut self, predicted: Verdict, actual_friend: bool) {
        match (predicted, actual_friend) {
            (Verdict::NotFriend, false) => self.tn += 1,
            (Verdict::Friend, false) => self.fp += 1,
            (Verdict::NotFriend, true) => self.fn_ += 1,
            (Verdict::Friend, true) => self.tp += 1,
        }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            tn: self.tn + other.tn,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
            tp: self.tp + other.tp,
        }
    }
}

/// Tallies predictions against ground-truth friend flags.
pub fn confusion<'a>(
    predictions: impl IntoIterator<Item = (&'a UserId, Verdict)>,
    truth: &BTreeMap<UserId, bool>,
) -> Result<ConfusionMatrix> {
    let mut m = ConfusionMatrix::default();
    for (id, verdict) in predictions {
        let actual = *truth.get(id).ok_or_else(|| Error::MissingTruth(id.clone()))?;
        m.record(verdict, actual);
    }
    Ok(m)
}

/// Precision, recall and F1; `None` where a denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub precision: Option<Rational>,
    pub recall: Option<Rational>,
    pub f1: Option<Rational>,
}

pub fn metrics(m: &ConfusionMatrix) -> Metrics {
    let ratio = |n: u64, d: u64| (d > 0).then(|| Rational::new(n, d));
    let precision = ratio(m.tp, m.tp + m.fp);
    let recall = ratio(m.tp, m.tp + m.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > Rational::from_integer(0) => {
            Some(Rational::from_integer(2) * p * r / (p + r))
        }
        _ => None,
    };
    Metrics {
        precision,
        recall,
        f1,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub precision: Option<f64>,
    pub precision_exact: Option<String>,
    pub recall: Option<f64>,
    pub recall_exact: Option<String>,
    pub f1: Option<f64>,
    pub f1_exact: Option<String>,
}

impl From<&Metrics> for MetricsRow {
    fn from(m: &Metrics) -> Self {
        let f = |r: &Option<Rational>| r.as_ref().map(rational::to_f64);
        let s = |r: &Option<Rational>| r.as_ref().map(rational::format);
        MetricsRow {
            precision: f(&m.precision),
            precision_exact: s(&m.precision),
            recall: f(&m.recall),
            recall_exact: s(&m.recall),
            f1: f(&m.f1),
            f1_exact: s(&m.f1),
        }
    }
}

/// Which candidates enter the confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfusionPopulation {
    /// Only candidates that survived pruning and were scored.
    #[default]
    ScoredOnly,
    /// Pruned single-edge candidates count as NOT_FRIEND predictions.
    PrunedAsNotFriend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub prune: bool,
    pub population: ConfusionPopulation,
    pub budget: Option<u64>,
    /// Victims analysed concurrently; 1 runs them in sequence.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            prune: true,
            population: ConfusionPopulation::ScoredOnly,
            budget: None,
            jobs: 1,
        }
    }
}

/// Everything the pipeline produced for one victim.
#[derive(Debug, Clone)]
pub struct VictimAnalysis {
    pub victim: UserId,
    pub found: FriendsFound,
    pub mutuals: MutualFriendMap,
    /// Graph before pruning, with single-edge nodes still present.
    pub graph: FriendshipGraph,
    /// Graph the candidates were drawn from.
    pub scored_graph: FriendshipGraph,
    pub pruned: Vec<UserId>,
    pub friend_records: Vec<FriendRecord>,
    pub rates: AttributeRates,
    pub guesses: Vec<RankedGuess>,
    /// Classified when thresholds were supplied.
    pub scores: Vec<CandidateScore>,
    pub queries: u64,
}

#[derive(Debug, Clone)]
pub enum VictimOutcome {
    Analyzed(Box<VictimAnalysis>),
    Skipped {
        victim: UserId,
        reason: String,
        candidates_checked: usize,
        queries: u64,
    },
}

impl VictimOutcome {
    pub fn victim(&self) -> &UserId {
        match self {
            VictimOutcome::Analyzed(a) => &a.victim,
            VictimOutcome::Skipped { victim, .. } => victim,
        }
    }

    pub fn analysis(&self) -> Option<&VictimAnalysis> {
        match self {
            VictimOutcome::Analyzed(a) => Some(a),
            VictimOutcome::Skipped { .. } => None,
        }
    }
}

/// Runs recovery, collection, graph building, pruning, rating and scoring
/// for one victim. Only the oracle is consulted.
pub fn analyze_victim(
    snapshot: &OsnSnapshot,
    victim: &UserId,
    thresholds: Option<&Thresholds>,
    config: &ExperimentConfig,
) -> Result<VictimOutcome> {
    let oracle = OracleHandle::with_budget(snapshot, config.budget);
    let found = socialspy_s4(victim, &oracle)?;
    if found.friends.is_empty() {
        return Ok(VictimOutcome::Skipped {
            victim: victim.clone(),
            reason: "no friends recovered".into(),
            candidates_checked: found.candidates_checked,
            queries: oracle.queries(),
        });
    }
    let mutuals = collect_2hop_from(&found, &oracle)?;
    let graph = build_graph(victim, &mutuals)?;
    let (scored_graph, pruned) = if config.prune {
        (prune_single_edge(&graph), graph.single_edge_ids())
    } else {
        (graph.clone(), Vec::new())
    };
    let friend_records = collect_friend_records(&found, &oracle)?;
    let rates = AttributeRates::from_records(&friend_records, victim)?;
    let guesses = rank_guesses(&rates);
    let mut scores = score_candidates(&scored_graph, &rates, &oracle)?;
    if let Some(t) = thresholds {
        scores = classify(&scores, t);
    }
    Ok(VictimOutcome::Analyzed(Box::new(VictimAnalysis {
        victim: victim.clone(),
        found,
        mutuals,
        graph,
        scored_graph,
        pruned,
        friend_records,
        rates,
        guesses,
        scores,
        queries: oracle.queries(),
    })))
}

/// Scored candidates paired with their ground-truth friendship to the victim.
pub fn labeled_candidates(snapshot: &OsnSnapshot, a: &VictimAnalysis) -> Vec<(CandidateScore, bool)> {
    a.scores
        .iter()
        .map(|s| (s.clone(), snapshot.are_friends(&a.victim, &s.candidate)))
        .collect()
}

/// Confusion matrix of a classified analysis.
pub fn victim_confusion(
    snapshot: &OsnSnapshot,
    a: &VictimAnalysis,
    population: ConfusionPopulation,
) -> Result<ConfusionMatrix> {
    let mut predictions: Vec<(&UserId, Verdict)> = Vec::new();
    for s in &a.scores {
        let verdict = s.verdict.ok_or_else(|| Error::MissingTruth(s.candidate.clone()))?;
        predictions.push((&s.candidate, verdict));
    }
    if population == ConfusionPopulation::PrunedAsNotFriend {
        predictions.extend(a.pruned.iter().map(|id| (id, Verdict::NotFriend)));
    }
    let truth: BTreeMap<UserId, bool> = predictions
        .iter()
        .map(|(id, _)| ((*id).clone(), snapshot.are_friends(&a.victim, id)))
        .collect();
    confusion(predictions, &truth)
}

#[derive(Debug, Clone, Serialize)]
pub struct StageCounts {
    pub candidates_checked: usize,
    pub friends_found: usize,
    pub ground_truth_friends: usize,
    pub mutual_pairs: usize,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub two_hop_before_pruning: usize,
    pub pruned: usize,
    pub candidates_scored: usize,
    pub oracle_queries: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GuessEntry {
    pub label: String,
    pub rate: f64,
    pub rate_exact: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VictimReport {
    pub victim: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<StageCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsRow>,
    pub guesses: BTreeMap<Feature, Vec<GuessEntry>>,
    pub truth: AttributeTriple,
}

/// A confusion matrix with rational cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeanConfusion {
    #[serde(with = "rational::serde_exact")]
    pub tn: Rational,
    #[serde(with = "rational::serde_exact")]
    pub fp: Rational,
    #[serde(rename = "fn", with = "rational::serde_exact")]
    pub fn_: Rational,
    #[serde(with = "rational::serde_exact")]
    pub tp: Rational,
}

impl MeanConfusion {
    /// Element-wise mean; `None` for an empty slice.
    pub fn of(matrices: &[ConfusionMatrix]) -> Option<Self> {
        let n = matrices.len() as u64;
        if n == 0 {
            return None;
        }
        let sum = matrices.iter().fold(ConfusionMatrix::default(), |a, m| a.add(m));
        Some(Self {
            tn: Rational::new(sum.tn, n),
            fp: Rational::new(sum.fp, n),
            fn_: Rational::new(sum.fn_, n),
            tp: Rational::new(sum.tp, n),
        })
    }

    /// Cells rounded half away from zero.
    pub fn rounded(&self) -> ConfusionMatrix {
        let r = |x: &Rational| *x.round().numer();
        ConfusionMatrix {
            tn: r(&self.tn),
            fp: r(&self.fp),
            fn_: r(&self.fn_),
            tp: r(&self.tp),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AccuracyTable {
    pub top1: BTreeMap<Feature, Option<f64>>,
    pub top2: BTreeMap<Feature, Option<f64>>,
    /// Convenience: true value ranked first or second.
    pub top2_cumulative: BTreeMap<Feature, Option<f64>>,
    pub top1_exact: BTreeMap<Feature, Option<String>>,
    pub top2_exact: BTreeMap<Feature, Option<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateReport {
    pub victims_total: usize,
    pub victims_evaluated: usize,
    pub victims_skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_confusion: Option<MeanConfusion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_confusion_rounded: Option<ConfusionMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pooled_confusion: Option<ConfusionMatrix>,
    /// Metrics of the pooled matrix; identical to those of the mean matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attribute_accuracy: Option<AccuracyTable>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub thresholds: Option<Thresholds>,
    pub config: ExperimentConfig,
    pub victims: Vec<VictimReport>,
    pub aggregate: AggregateReport,
}

/// Outcomes plus the serializable report.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub outcomes: Vec<VictimOutcome>,
    pub report: ExperimentReport,
}

fn guess_entries(guesses: &[RankedGuess]) -> BTreeMap<Feature, Vec<GuessEntry>> {
    guesses
        .iter()
        .map(|g| {
            (
                g.feature,
                g.values
                    .iter()
                    .map(|(l, r)| GuessEntry {
                        label: l.display().to_string(),
                        rate: rational::to_f64(r),
                        rate_exact: rational::format(r),
                    })
                    .collect(),
            )
        })
        .collect()
}

fn accuracy_table(cases: &[VictimGuesses]) -> Result<AccuracyTable> {
    let top1 = top_k_accuracy(cases, 1)?;
    let top2 = top_k_accuracy(cases, 2)?;
    let cumulative = top_k_cumulative_accuracy(cases, 2)?;
    let as_f64 = |m: &BTreeMap<Feature, Option<Rational>>| {
        m.iter()
            .map(|(f, r)| (*f, r.as_ref().map(rational::to_f64)))
            .collect()
    };
    let as_str = |m: &BTreeMap<Feature, Option<Rational>>| {
        m.iter()
            .map(|(f, r)| (*f, r.as_ref().map(rational::format)))
            .collect()
    };
    Ok(AccuracyTable {
        top1: as_f64(&top1),
        top2: as_f64(&top2),
        top2_cumulative: as_f64(&cumulative),
        top1_exact: as_str(&top1),
        top2_exact: as_str(&top2),
    })
}

/// Runs the full pipeline for every victim and evaluates it against the
/// snapshot's ground truth. Without thresholds, candidates are scored but not
/// classified and no confusion matrices are produced.
pub fn run_experiment(
    snapshot: &OsnSnapshot,
    victims: &[UserId],
    thresholds: Option<&Thresholds>,
    config: &ExperimentConfig,
) -> Result<Experiment> {
    if victims.is_empty() {
        return Err(Error::EmptyVictimSet);
    }
    for v in victims {
        snapshot.require_user(v)?;
    }

    let run = |v: &UserId| analyze_victim(snapshot, v, thresholds, config);
    let outcomes: Vec<VictimOutcome> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| victims.par_iter().map(run).collect::<Result<_>>())?
    } else {
        victims.iter().map(run).collect::<Result<_>>()?
    };

    let mut reports = Vec::with_capacity(outcomes.len());
    let mut matrices = Vec::new();
    let mut cases = Vec::new();
    for outcome in &outcomes {
        let truth = snapshot.require_user(outcome.victim())?.attributes();
        match outcome {
            VictimOutcome::Skipped {
                victim,
                reason,
                ..
            } => reports.push(VictimReport {
                victim: victim.to_string(),
                status: "skipped".into(),
                reason: Some(reason.clone()),
                stages: None,
                confusion: None,
                metrics: None,
                guesses: BTreeMap::new(),
                truth,
            }),
            VictimOutcome::Analyzed(a) => {
                let matrix = thresholds
                    .map(|_| victim_confusion(snapshot, a, config.population))
                    .transpose()?;
                if let Some(m) = matrix {
                    matrices.push(m);
                }
                cases.push(VictimGuesses {
                    guesses: a.guesses.clone(),
                    truth: truth.clone(),
                });
                reports.push(VictimReport {
                    victim: a.victim.to_string(),
                    status: "analyzed".into(),
                    reason: None,
                    stages: Some(StageCounts {
                        candidates_checked: a.found.candidates_checked,
                        friends_found: a.found.friends.len(),
                        ground_truth_friends: snapshot.friends_of(&a.victim).len(),
                        mutual_pairs: a.mutuals.len(),
                        graph_nodes: a.graph.node_count(),
                        graph_edges: a.graph.edge_count(),
                        two_hop_before_pruning: a.graph.two_hop().count(),
                        pruned: a.pruned.len(),
                        candidates_scored: a.scores.len(),
                        oracle_queries: a.queries,
                    }),
                    confusion: matrix,
                    metrics: matrix.as_ref().map(|m| MetricsRow::from(&metrics(m))),
                    guesses: guess_entries(&a.guesses),
                    truth,
                });
            }
        }
    }

    let mean = MeanConfusion::of(&matrices);
    let pooled = (!matrices.is_empty())
        .then(|| matrices.iter().fold(ConfusionMatrix::default(), |a, m| a.add(m)));
    let aggregate = AggregateReport {
        victims_total: outcomes.len(),
        victims_evaluated: cases.len(),
        victims_skipped: outcomes.len() - cases.len(),
        mean_confusion: mean,
        mean_confusion_rounded: mean.map(|m| m.rounded()),
        pooled_confusion: pooled,
        metrics: pooled.as_ref().map(|m| MetricsRow::from(&metrics(m))),
        attribute_accuracy: if cases.is_empty() {
            None
        } else {
            Some(accuracy_table(&cases)?)
        },
    };

    Ok(Experiment {
        outcomes,
        report: ExperimentReport {
            thresholds: thresholds.copied(),
            config: *config,
            victims: reports,
            aggregate,
        },
    })
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.2}%", 100.0 * x)).unwrap_or_else(|| "n/a".into())
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "undefined".into())
}

/// Plain-text summary with the averaged confusion matrix and the Top-1 /
/// Top-2 attribute accuracy table.
pub fn render_summary(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let agg = &report.aggregate;
    let _ = writeln!(
        s,
        "victims: {} total, {} evaluated, {} skipped",
        agg.victims_total, agg.victims_evaluated, agg.victims_skipped
    );
    for v in &report.victims {
        match (&v.confusion, &v.stages) {
            (Some(m), _) => {
                let _ = writeln!(
                    s,
                    "  {:<16} tn={} fp={} fn={} tp={}",
                    v.victim, m.tn, m.fp, m.fn_, m.tp
                );
            }
            (None, Some(st)) => {
                let _ = writeln!(
                    s,
                    "  {:<16} {} friends found, {} candidates scored",
                    v.victim, st.friends_found, st.candidates_scored
                );
            }
            _ => {
                let _ = writeln!(s, "  {:<16} skipped", v.victim);
            }
        }
    }
    if let (Some(mean), Some(rounded)) = (&agg.mean_confusion, &agg.mean_confusion_rounded) {
        s.push_str("\naverage confusion matrix\n");
        let _ = writeln!(s, "{:>22} {:>16} {:>16}", "", "Not predicted", "Predicted");
        let _ = writeln!(
            s,
            "{:>22} {:>16} {:>16}",
            "Actually not friend",
            format!("{} ({})", rounded.tn, rational::format(&mean.tn)),
            format!("{} ({})", rounded.fp, rational::format(&mean.fp)),
        );
        let _ = writeln!(
            s,
            "{:>22} {:>16} {:>16}",
            "Actually friend",
            format!("{} ({})", rounded.fn_, rational::format(&mean.fn_)),
            format!("{} ({})", rounded.tp, rational::format(&mean.tp)),
        );
    }
    if let Some(m) = &agg.metrics {
        let _ = writeln!(
            s,
            "\nprecision {}  recall {}  f1 {}",
            num(m.precision),
            num(m.recall),
            num(m.f1)
        );
    }
    if let Some(acc) = &agg.attribute_accuracy {
        s.push_str("\nattribute accuracy\n");
        let _ = writeln!(s, "{:>8} {:>14} {:>10} {:>10}", "", "Current City", "Hometown", "Education");
        for (name, row) in [("TOP 1", &acc.top1), ("TOP 2", &acc.top2)] {
            let _ = writeln!(
                s,
                "{:>8} {:>14} {:>10} {:>10}",
                name,
                pct(row[&Feature::CurrentCity]),
                pct(row[&Feature::Hometown]),
                pct(row[&Feature::Education]),
            );
        }
    }
    s
}

/// CSV rows for a victim's score table.
pub fn score_rows(scores: &[CandidateScore]) -> Vec<ScoreRow> {
    scores.iter().map(ScoreRow::from).collect()
}

//! Artifact emission. Every file is written to a temporary sibling and
//! renamed into place, so readers see either the complete file or nothing.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::attrs::{AttributeRates, FriendRecord};
use crate::error::{Error, Result};
use crate::eval::{score_rows, Experiment, MetricsRow, VictimOutcome, VictimReport};
use crate::model::{Feature, UserId};
use crate::rational;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

/// Directory name for a victim: ids are opaque, so anything outside
/// `[A-Za-z0-9._-]` becomes `_`.
pub fn victim_dir_name(id: &UserId) -> String {
    let name: String = id
        .as_str()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect();
    if name == "." || name == ".." {
        format!("_{name}")
    } else {
        name
    }
}

#[derive(Serialize)]
struct RateRow<'a> {
    feature: &'static str,
    label: &'a str,
    count: u64,
    rate: f64,
    rate_exact: String,
}

pub fn rates_csv(rates: &AttributeRates) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for feature in Feature::ALL {
        for (label, rate) in rates.table(feature) {
            rows.push((feature, label, rate));
        }
    }
    csv_bytes(rows.iter().map(|(feature, label, rate)| RateRow {
        feature: feature.name(),
        label: label.display(),
        count: rates.count(*feature, label),
        rate: rational::to_f64(rate),
        rate_exact: rational::format(rate),
    }))
}

#[derive(Serialize)]
struct FriendRow<'a> {
    source: &'a str,
    public: bool,
    education: &'a str,
    hometown: &'a str,
    current_city: &'a str,
}

pub fn friends_csv(records: &[FriendRecord]) -> Result<Vec<u8>> {
    let field = |r: &'_ FriendRecord, f: Feature| -> String {
        r.attributes.get(f).map(|l| l.display().to_string()).unwrap_or_default()
    };
    let owned: Vec<(String, bool, String, String, String)> = records
        .iter()
        .map(|r| {
            (
                r.source.to_string(),
                r.public,
                field(r, Feature::Education),
                field(r, Feature::Hometown),
                field(r, Feature::CurrentCity),
            )
        })
        .collect();
    csv_bytes(owned.iter().map(|(s, p, e, h, c)| FriendRow {
        source: s,
        public: *p,
        education: e,
        hometown: h,
        current_city: c,
    }))
}

/// Writes one victim's artifacts under `dir`; skipped victims get only
/// `report.json`.
pub fn write_victim(dir: &Path, outcome: &VictimOutcome, report: &VictimReport) -> Result<()> {
    write_json(&dir.join("report.json"), report)?;
    let Some(a) = outcome.analysis() else {
        return Ok(());
    };
    write_atomic(&dir.join("graph.dot"), a.graph.to_dot().as_bytes())?;
    write_json(&dir.join("mutuals.json"), &a.mutuals.to_json_value())?;
    write_atomic(&dir.join("rates.csv"), &rates_csv(&a.rates)?)?;
    write_atomic(&dir.join("scores.csv"), &csv_bytes(score_rows(&a.scores))?)?;
    write_json(&dir.join("scores.json"), &score_rows(&a.scores))?;
    write_json(&dir.join("friends.json"), &a.friend_records)?;
    write_atomic(&dir.join("friends.csv"), &friends_csv(&a.friend_records)?)?;
    Ok(())
}

#[derive(Serialize)]
struct MetricsCsvRow {
    scope: String,
    tn: Option<u64>,
    fp: Option<u64>,
    #[serde(rename = "fn")]
    fn_: Option<u64>,
    tp: Option<u64>,
    precision: Option<f64>,
    recall: Option<f64>,
    f1: Option<f64>,
}

/// Writes `<out>/<victim>/...`, `aggregate.json`, `metrics.csv` and
/// `summary.txt`. Returns the victim directories in victim order.
pub fn write_experiment(out: &Path, experiment: &Experiment) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for (outcome, report) in experiment.outcomes.iter().zip(&experiment.report.victims) {
        let dir = out.join(victim_dir_name(outcome.victim()));
        write_victim(&dir, outcome, report)?;
        dirs.push(dir);
    }
    write_json(&out.join("aggregate.json"), &experiment.report)?;
    write_atomic(
        &out.join("summary.txt"),
        crate::eval::render_summary(&experiment.report).as_bytes(),
    )?;

    let mut rows: Vec<MetricsCsvRow> = experiment
        .report
        .victims
        .iter()
        .filter_map(|v| {
            let m = v.confusion?;
            let metrics = v.metrics.as_ref()?;
            Some(metrics_row(v.victim.clone(), Some(m), metrics))
        })
        .collect();
    let agg = &experiment.report.aggregate;
    if let Some(metrics) = &agg.metrics {
        rows.push(metrics_row("pooled".into(), agg.pooled_confusion, metrics));
        rows.push(metrics_row("mean_rounded".into(), agg.mean_confusion_rounded, metrics));
    }
    write_atomic(&out.join("metrics.csv"), &csv_bytes(rows)?)?;
    Ok(dirs)
}

fn metrics_row(
    scope: String,
    m: Option<crate::eval::ConfusionMatrix>,
    metrics: &MetricsRow,
) -> MetricsCsvRow {
    MetricsCsvRow {
        scope,
        tn: m.map(|m| m.tn),
        fp: m.map(|m| m.fp),
        fn_: m.map(|m| m.fn_),
        tp: m.map(|m| m.tp),
        precision: metrics.precision,
        recall: metrics.recall,
        f1: metrics.f1,
    }
}

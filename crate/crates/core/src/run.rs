//! End-to-end run configuration: snapshot source, victims, thresholds and
//! output location.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{analyze_victim, labeled_candidates, run_experiment, Experiment, ExperimentConfig, VictimOutcome};
use crate::generate::{generate_synthetic, GeneratorConfig};
use crate::model::{OsnSnapshot, UserId};
use crate::output::{write_experiment, write_json};
use crate::scoring::{calibrate, Calibration, Thresholds};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OSSINT_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotSource {
    Path(PathBuf),
    Generate { params: GeneratorConfig, seed: u64 },
}

impl SnapshotSource {
    pub fn load(&self) -> Result<OsnSnapshot> {
        match self {
            SnapshotSource::Path(p) => OsnSnapshot::load(p),
            SnapshotSource::Generate { params, seed } => generate_synthetic(params, *seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    Fixed(Thresholds),
    /// Calibrate on these victims first, then evaluate the run victims.
    Calibrate { victims: Vec<UserId> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub snapshot: SnapshotSource,
    pub victims: Vec<UserId>,
    pub thresholds: ThresholdSource,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.victims.is_empty() {
            return Err(Error::EmptyVictimSet);
        }
        if let ThresholdSource::Calibrate { victims } = &self.thresholds {
            if victims.is_empty() {
                return Err(Error::EmptyVictimSet);
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Runs the pipeline on calibration victims and picks the F1-optimal
/// thresholds over their pooled candidates.
pub fn calibrate_on(
    snapshot: &OsnSnapshot,
    victims: &[UserId],
    config: &ExperimentConfig,
) -> Result<Calibration> {
    if victims.is_empty() {
        return Err(Error::EmptyVictimSet);
    }
    let mut labeled = Vec::new();
    for v in victims {
        snapshot.require_user(v)?;
        if let VictimOutcome::Analyzed(a) = analyze_victim(snapshot, v, None, config)? {
            labeled.extend(labeled_candidates(snapshot, &a));
        }
    }
    calibrate(&labeled)
}

/// Loads the snapshot, resolves thresholds, runs the experiment and writes
/// every artifact under `out_dir`.
pub fn execute(config: &RunConfig) -> Result<Experiment> {
    config.validate()?;
    let snapshot = config.snapshot.load()?;
    let thresholds = match &config.thresholds {
        ThresholdSource::Fixed(t) => *t,
        ThresholdSource::Calibrate { victims } => {
            let cal = calibrate_on(&snapshot, victims, &config.experiment)?;
            write_json(&config.out_dir.join("calibration.json"), &cal)?;
            cal.thresholds
        }
    };
    let experiment = run_experiment(&snapshot, &config.victims, Some(&thresholds), &config.experiment)?;
    write_experiment(&config.out_dir, &experiment)?;
    Ok(experiment)
}

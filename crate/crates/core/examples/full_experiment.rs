// Calibrate on one group of victims, evaluate eight others and write every
// artifact to a directory.

use ossint::eval::{render_summary, ConfusionPopulation};
use ossint::run::{execute, RunConfig, SnapshotSource, ThresholdSource};
use ossint::{generate_synthetic, ExperimentConfig, GeneratorConfig, UserId};

pub fn run_example() -> anyhow::Result<()> {
    let params = GeneratorConfig {
        users: 120,
        ..GeneratorConfig::default()
    };
    // Only victims with a public picture can be analysed.
    let snapshot = generate_synthetic(&params, 3)?;
    let visible: Vec<UserId> = snapshot
        .user_ids()
        .filter(|u| snapshot.pictures_of(u).any(|p| p.public))
        .cloned()
        .collect();
    anyhow::ensure!(visible.len() >= 16, "too few visible users");

    let out = tempfile::tempdir()?;
    let config = RunConfig {
        snapshot: SnapshotSource::Generate { params, seed: 3 },
        victims: visible[..8].to_vec(),
        thresholds: ThresholdSource::Calibrate {
            victims: visible[8..16].to_vec(),
        },
        out_dir: out.path().to_path_buf(),
        experiment: ExperimentConfig {
            population: ConfusionPopulation::ScoredOnly,
            jobs: 4,
            ..ExperimentConfig::default()
        },
    };
    let experiment = execute(&config)?;
    print!("{}", render_summary(&experiment.report));

    let mut written: Vec<String> = std::fs::read_dir(out.path())?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()?;
    written.sort();
    println!("wrote {}", written.join(", "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

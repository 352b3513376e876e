// Pick the F1-optimal thresholds from labeled victims in a synthetic network.

use ossint::eval::{analyze_victim, labeled_candidates, ExperimentConfig};
use ossint::rational::{format, to_f64};
use ossint::scoring::calibrate;
use ossint::{generate_synthetic, GeneratorConfig, UserId};

pub fn run_example() -> anyhow::Result<()> {
    let config = GeneratorConfig {
        users: 80,
        ..GeneratorConfig::default()
    };
    let snapshot = generate_synthetic(&config, 11)?;
    let victims: Vec<UserId> = snapshot.user_ids().take(10).cloned().collect();

    let mut labeled = Vec::new();
    for v in &victims {
        if let Some(a) = analyze_victim(&snapshot, v, None, &ExperimentConfig::default())?.analysis() {
            labeled.extend(labeled_candidates(&snapshot, a));
        }
    }
    let positives = labeled.iter().filter(|(_, friend)| *friend).count();
    println!("{} labeled candidates, {positives} true friends", labeled.len());

    let cal = calibrate(&labeled)?;
    println!(
        "best_info {} best_edges {}  f1 {:.4} precision {:.4}",
        format(&cal.thresholds.best_info),
        format(&cal.thresholds.best_edges),
        to_f64(&cal.f1),
        to_f64(&cal.precision)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

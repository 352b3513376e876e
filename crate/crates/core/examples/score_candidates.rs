// Score four 2-hop candidates against a fixed rate table and apply the
// two-threshold rule.

use ossint::fixtures::{reference_candidates, reference_rates};
use ossint::rational::{format, to_f64};
use ossint::scoring::{classify, score_pool};
use ossint::{Rational, Thresholds};

pub fn run_example() -> anyhow::Result<()> {
    let rates = reference_rates();
    let scores = score_pool(&reference_candidates(), &rates);
    let thresholds = Thresholds::new(Rational::new(1, 50), Rational::new(1, 2))?;
    println!("{:<12} {:>8} {:>6} {:>6}  verdict", "candidate", "info", "edges", "edge");
    for s in classify(&scores, &thresholds) {
        println!(
            "{:<12} {:>8.4} {:>6} {:>6}  {}",
            s.candidate.as_str(),
            to_f64(&s.info_score),
            s.shared_edges,
            format(&s.edge_score),
            s.verdict.expect("classified")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

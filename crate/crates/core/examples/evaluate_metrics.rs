// Precision, recall and F1 from a confusion matrix, exactly and as decimals.

use ossint::eval::metrics;
use ossint::fixtures::REFERENCE_CONFUSION;
use ossint::rational::{format, to_f64};

pub fn run_example() -> anyhow::Result<()> {
    let m = REFERENCE_CONFUSION;
    println!("tn {} fp {} fn {} tp {}", m.tn, m.fp, m.fn_, m.tp);
    let scores = metrics(&m);
    for (name, value) in [
        ("precision", scores.precision),
        ("recall", scores.recall),
        ("f1", scores.f1),
    ] {
        let value = value.ok_or_else(|| anyhow::anyhow!("{name} undefined"))?;
        println!("{name:<9} {:.4} ({})", to_f64(&value), format(&value));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

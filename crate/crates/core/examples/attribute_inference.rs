// Guess a private victim's education, hometown and current city from the
// public profiles of the friends recovered around them.

use ossint::attrs::{extract_rates, rank_guesses};
use ossint::fixtures::{reference_snapshot, VICTIM};
use ossint::rational::format;
use ossint::socialspy::socialspy_s4;
use ossint::{OracleHandle, UserId};

pub fn run_example() -> anyhow::Result<()> {
    let snapshot = reference_snapshot();
    let victim = UserId::new(VICTIM)?;
    let oracle = OracleHandle::new(&snapshot);

    let found = socialspy_s4(&victim, &oracle)?;
    let rates = extract_rates(&found, &oracle)?;
    let truth = snapshot.require_user(&victim)?.attributes();
    for guess in rank_guesses(&rates) {
        let top: Vec<String> = guess
            .values
            .iter()
            .take(3)
            .map(|(label, rate)| format!("{} {}", label, format(rate)))
            .collect();
        let rank = truth
            .get(guess.feature)
            .and_then(|t| guess.position_of(t))
            .map_or("-".to_string(), |p| p.to_string());
        println!("{:<13} {:<40} truth rank {rank}", guess.feature.name(), top.join(", "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

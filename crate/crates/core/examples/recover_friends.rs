// Recover a private victim's friends from engagement on their public pictures.

use ossint::fixtures::{reference_snapshot, VICTIM};
use ossint::socialspy::{friend_found_line, socialspy_s4};
use ossint::{OracleHandle, UserId};

pub fn run_example() -> anyhow::Result<()> {
    let snapshot = reference_snapshot();
    let victim = UserId::new(VICTIM)?;
    let oracle = OracleHandle::new(&snapshot);

    let found = socialspy_s4(&victim, &oracle)?;
    for (i, id) in found.friends.iter().take(5).enumerate() {
        let name = snapshot.require_user(id)?.display_name();
        println!("{}", friend_found_line(i + 1, name, id));
    }
    println!(
        "recovered {} of {} friends after checking {} candidates ({} oracle queries)",
        found.friends.len(),
        snapshot.friends_of(&victim).len(),
        found.candidates_checked,
        oracle.queries()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

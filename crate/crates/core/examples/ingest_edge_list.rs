// Turn a plain edge list plus an attribute document into a snapshot with
// simulated picture activity.

use ossint::generate::{ingest_edge_list, AttributeRow};
use ossint::GeneratorConfig;

const EDGES: &str = "\
# alice's circle
alice bob
alice carol
bob carol
carol dave
";

const ATTRS: &str = r#"[
  {"id": "alice", "feature": "hometown", "value": "Padua"},
  {"id": "bob", "feature": "education", "value": "Venice"},
  {"id": "erin", "feature": "current_city", "value": "Rome"}
]"#;

pub fn run_example() -> anyhow::Result<()> {
    let attrs: Vec<AttributeRow> = serde_json::from_str(ATTRS)?;
    let snapshot = ingest_edge_list(EDGES, Some(&attrs), &GeneratorConfig::default(), 1)?;
    for user in snapshot.users() {
        println!(
            "{:<6} friends {:?} pictures {}",
            user.id.as_str(),
            user.friends.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
            snapshot.pictures_of(&user.id).count()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

// Generate a small synthetic network and round-trip it through JSON.

use ossint::{generate_synthetic, GeneratorConfig, OsnSnapshot};

pub fn run_example() -> anyhow::Result<()> {
    let config = GeneratorConfig {
        users: 60,
        mean_degree: 8.0,
        ..GeneratorConfig::default()
    };
    let snapshot = generate_synthetic(&config, 7)?;
    let edges = snapshot.edges().len();
    let public_pictures = snapshot.pictures().filter(|p| p.public).count();
    println!(
        "{} users, {} friendships, {} pictures ({} public)",
        snapshot.len(),
        edges,
        snapshot.pictures().len(),
        public_pictures
    );

    let json = snapshot.to_json_string();
    let reloaded = OsnSnapshot::from_json_str(&json)?;
    assert_eq!(reloaded.to_json_string(), json);
    println!("snapshot document is {} bytes and round-trips", json.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

// Collect mutual friends around a victim, build the 2-hop graph, prune it
// and print it as DOT.

use ossint::fixtures::{reference_snapshot, VICTIM};
use ossint::twohop::{build_graph, collect_2hop, prune_single_edge};
use ossint::{OracleHandle, UserId};

pub fn run_example() -> anyhow::Result<()> {
    let snapshot = reference_snapshot();
    let victim = UserId::new(VICTIM)?;
    let oracle = OracleHandle::new(&snapshot);

    let map = collect_2hop(&victim, &oracle)?;
    let graph = build_graph(&victim, &map)?;
    println!(
        "{} friend pairs, {} nodes, {} edges, {} 2-hop ids",
        map.len(),
        graph.node_count(),
        graph.edge_count(),
        graph.two_hop().count()
    );
    for id in graph.two_hop() {
        println!("  {id}: {} shared", graph.shared_edge_count(id)?);
    }

    let pruned = prune_single_edge(&graph);
    println!("pruned: {:?}", graph.single_edge_ids());
    let dot = pruned.to_dot();
    for line in dot.lines().filter(|l| l.contains("fillcolor") && l.contains("2-hop")) {
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}

//! Runs the bundled random GRNN weights as a decentralized policy on the
//! seven-node Australian topology, relabeling nodes every episode, and
//! prints one node's action distribution at the first slot.

use std::sync::Arc;

use netsampler::estimation::RewardMode;
use netsampler::grnn::{load_weights_file, GrnnPolicy};
use netsampler::harness::{evaluate_with, EpisodeConfig, GraphSource, PolicyFactory, PolicySpec, ResampleRule, Seeds};
use netsampler::mac::{MuDomain, Simulator};
use netsampler::policy::observe;
use netsampler::topology::load_topology_zoo;

fn main() -> netsampler::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let weights_path = dir.join("random_weights.json");
    let graph_path = dir.join("aus_simple.graphml");
    let weights = Arc::new(load_weights_file(&weights_path)?);
    println!("dims {:?}", weights.dims());

    let topology = load_topology_zoo(&graph_path)?;
    let sim = Simulator::new(topology, 1.0, MuDomain::Full, RewardMode::Realized);
    let mut policy = GrnnPolicy::new(weights.clone());
    let dist = policy.probabilities(&observe(&sim, 0))?;
    println!("node 0 at slot 0:");
    for (d, p) in dist {
        println!("  {:?} -> {p:.4}", d.to_pair(0));
    }

    let cfg = EpisodeConfig {
        graph: GraphSource::Graphml { path: graph_path },
        seeds: Seeds::all(3),
        policy: PolicySpec::grnn(weights_path),
        ..EpisodeConfig::default()
    };
    let report = evaluate_with(&cfg, &PolicyFactory::from_weights(weights), 10, ResampleRule::Permute)?;
    let a = &report.aggregate;
    println!(
        "10 permuted episodes: ASEE {:.3} ± {:.3}, collision rate {:.3}",
        a.asee.mean, a.asee.se, a.collision_rate.mean
    );
    Ok(())
}

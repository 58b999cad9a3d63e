//! Topology ingestion and generation: a Topology Zoo GraphML file, a
//! relabeling of it, a Watts–Strogatz graph and a stochastic block model.
//!
//! ```text
//! cargo run --example topology_zoo -- [file.graphml]
//! ```

use netsampler::rng::{seeded, stream};
use netsampler::topology::{generate_sbm, generate_watts_strogatz, load_topology_zoo, random_permutation, Topology};

fn describe(name: &str, t: &Topology) {
    let mut degrees = t.degree_sequence();
    degrees.sort_unstable();
    println!(
        "{name}: m={} edges={} connected={} degrees={degrees:?}",
        t.m(),
        t.edge_count(),
        t.is_connected()
    );
}

fn main() -> netsampler::Result<()> {
    let path = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/aus_simple.graphml")
    });
    let zoo = load_topology_zoo(&path)?;
    describe(&path.display().to_string(), &zoo);
    println!("  edges {:?}", zoo.edges());

    let p = random_permutation(zoo.m(), &mut seeded(4, stream::PERMUTATION));
    let relabeled = zoo.permute(&p)?;
    describe("relabeled", &relabeled);
    println!("  permutation {p:?}");
    println!("  edges {:?}", relabeled.edges());

    describe("watts_strogatz(10, 4, 0.3)", &generate_watts_strogatz(10, 4, 0.3, 7)?);
    describe("sbm([5, 5], 0.8, 0.2)", &generate_sbm(&[5, 5], 0.8, 0.2, 3)?);
    Ok(())
}

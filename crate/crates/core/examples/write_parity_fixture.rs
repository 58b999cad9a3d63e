//! Writes the forward-pass fixture that an external trainer replays to
//! check parity with this crate: for graphs with 3, 5 and 10 nodes, each
//! node's observation, input features, actor output `ŷ` (zero initial
//! hidden state) and masked action probabilities, all under the bundled
//! random weights and `S = A/m`.
//!
//! ```text
//! cargo run --example write_parity_fixture -- [out.json]
//! ```

use std::sync::Arc;

use nalgebra::DMatrix;
use netsampler::estimation::RewardMode;
use netsampler::grnn::{action_mask, action_scores, load_weights_file, masked_softmax, node_features, ShiftNormalization, ShiftOperator};
use netsampler::mac::{Decision, MuDomain, Simulator};
use netsampler::policy::{observe, Policy, UniformPolicy};
use netsampler::rng::{node_rng, seeded, stream};
use netsampler::topology::{generate_watts_strogatz, Topology};
use serde_json::{json, Value};

fn rows(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..x.nrows()).map(|i| x.row(i).iter().copied().collect()).collect()
}

fn main() -> netsampler::Result<()> {
    let assets = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let out = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| assets.join("parity_fixture.json"));
    let weights = Arc::new(load_weights_file(assets.join("random_weights.json"))?);
    let graphs = [Topology::path(3), Topology::cycle(5), generate_watts_strogatz(10, 4, 0.3, 1)?];
    let mut cases = Vec::new();
    for (g, t) in graphs.into_iter().enumerate() {
        let m = t.m();
        let mut sim = Simulator::new(t, 1.0, MuDomain::Full, RewardMode::Realized);
        let mut noise = seeded(g as u64, stream::NOISE);
        let mut policy = UniformPolicy::default();
        let mut rngs: Vec<_> = (0..m).map(|i| node_rng(g as u64, i)).collect();
        for _ in 0..5 {
            let d: Vec<Decision> = (0..m).map(|i| policy.decide(&observe(&sim, i), &mut rngs[i])).collect();
            sim.step(&d, &mut noise)?;
        }
        let shift = ShiftOperator::new(sim.topology(), ShiftNormalization::NodeCount);
        for node in 0..m {
            let obs = observe(&sim, node);
            let x = node_features(&obs);
            let y = weights.forward(&shift, &vec![x.clone(); weights.dims().t])?;
            let p = masked_softmax(&action_scores(&y, &weights.theta_action)?, &action_mask(&obs));
            cases.push(json!({
                "m": m,
                "adjacency": sim.topology().adjacency_rows(),
                "node": node,
                "slot": obs.slot,
                "ages": obs.ages,
                "feedback": obs.feedback.code(),
                "cached": obs.cached,
                "features": rows(&x),
                "y": rows(&y),
                "probabilities": rows(&p),
            }));
        }
    }
    let doc: Value = json!({
        "weights": "random_weights.json",
        "shift": "adjacency_over_m",
        "hidden_state": "zero",
        "cases": cases,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    std::fs::write(&out, bytes)?;
    println!("wrote {} ({} cases)", out.display(), doc["cases"].as_array().map_or(0, Vec::len));
    Ok(())
}

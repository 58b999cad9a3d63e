mod common;

use common::{fixture, max_abs_diff, naive_grnn};
use nalgebra::DMatrix;
use netsampler::grnn::{Grnn, GrnnDims, Shift, ShiftNormalization, ShiftOperator};
use netsampler::rng::seeded;
use netsampler::topology::Topology;
use rand::Rng;

#[test]
fn fifty_fixtures_match_explicit_powers() {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let f = fixture(seed);
        let s = ShiftOperator::new(&f.topology, f.normalization);
        let fast = f.net.forward(&s, &f.inputs).unwrap();
        let slow = naive_grnn(&f.net, &f.topology.adjacency(), s.scale(), &f.inputs);
        worst = worst.max(max_abs_diff(&fast, &slow));
    }
    assert!(worst <= 1e-10, "max deviation {worst:e}");
}

#[test]
fn six_cycle_matches_explicit_powers() {
    let t = Topology::cycle(6);
    let dims = GrnnDims { f: 2, h: 5, g: 3, t: 2, l: 4 };
    let net = Grnn::random(dims, &mut seeded(6, 0));
    let mut rng = seeded(6, 1);
    let inputs: Vec<_> = (0..2).map(|_| DMatrix::from_fn(6, 2, |_, _| rng.random_range(-1.0..1.0))).collect();
    let s = ShiftOperator::new(&t, ShiftNormalization::NodeCount);
    let fast = net.forward(&s, &inputs).unwrap();
    let slow = naive_grnn(&net, &t.adjacency(), 1.0 / 6.0, &inputs);
    assert!(max_abs_diff(&fast, &slow) <= 1e-10);
}

#[test]
fn dense_shift_agrees_with_sparse_application() {
    let f = fixture(3);
    let s = ShiftOperator::new(&f.topology, f.normalization);
    let x = &f.inputs[0];
    assert!(max_abs_diff(&s.shift(x), &(s.dense() * x)) <= 1e-14);
}

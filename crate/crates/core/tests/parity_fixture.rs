use nalgebra::DMatrix;
use netsampler::grnn::{action_mask, action_scores, load_weights_file, masked_softmax, node_features, ShiftNormalization, ShiftOperator};
use netsampler::mac::{Feedback, MuDomain};
use netsampler::policy::LocalObservation;
use netsampler::topology::Topology;
use serde_json::Value;

const ASSETS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/assets");

fn matrix(v: &Value) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).unwrap();
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

#[test]
fn bundled_fixture_matches_current_forward_pass() {
    let weights = load_weights_file(format!("{ASSETS}/random_weights.json")).unwrap();
    let doc: Value = serde_json::from_slice(&std::fs::read(format!("{ASSETS}/parity_fixture.json")).unwrap()).unwrap();
    let cases = doc["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 3 + 5 + 10);
    for c in cases {
        let adj: Vec<Vec<u8>> = serde_json::from_value(c["adjacency"].clone()).unwrap();
        let m = adj.len();
        let edges = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).filter(|&(i, j)| adj[i][j] == 1);
        let t = Topology::from_edges(m, edges, Default::default()).unwrap();
        let feedback = match c["feedback"].as_u64().unwrap() {
            0 => Feedback::NoTx,
            1 => Feedback::Success,
            _ => Feedback::Collision,
        };
        let obs = LocalObservation {
            node: c["node"].as_u64().unwrap() as usize,
            slot: c["slot"].as_u64().unwrap(),
            ages: serde_json::from_value(c["ages"].clone()).unwrap(),
            feedback,
            cached: serde_json::from_value(c["cached"].clone()).unwrap(),
            topology: &t,
            domain: MuDomain::Full,
        };
        let x = node_features(&obs);
        assert!(close(&x, &matrix(&c["features"]), 1e-15));
        let s = ShiftOperator::new(&t, ShiftNormalization::NodeCount);
        let y = weights.forward(&s, &vec![x; weights.dims().t]).unwrap();
        assert!(close(&y, &matrix(&c["y"]), 1e-12));
        let p = masked_softmax(&action_scores(&y, &weights.theta_action).unwrap(), &action_mask(&obs));
        assert!(close(&p, &matrix(&c["probabilities"]), 1e-12));
    }
}

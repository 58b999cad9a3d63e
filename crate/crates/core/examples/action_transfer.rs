//! Action-distribution transferability: the sup distance between limit
//! action densities on the graphon and on sampled graphs, and its ratio to
//! `‖ϑ‖ (‖Y⁽²⁾‖ + ‖Y_m⁽¹⁾‖) η₃`.

use nalgebra::DMatrix;
use netsampler::grnn::{Grnn, GrnnDims};
use netsampler::rng::seeded;
use netsampler::topology::GraphonSpec;
use netsampler::transfer::{
    action_transfer_check, default_signals, median_by_m, normalize_filters, ActionCheckConfig, DEFAULT_RESOLUTION,
};

fn main() -> netsampler::Result<()> {
    let mut net = Grnn::random(GrnnDims { f: 1, h: 1, g: 1, t: 2, l: 3 }, &mut seeded(5, 0));
    normalize_filters(&mut net);
    let cfg = ActionCheckConfig {
        graphon: GraphonSpec::Constant { p: 0.5 },
        net,
        first: default_signals(2, 0),
        second: default_signals(2, 3),
        theta: DMatrix::from_element(1, 1, 1.5),
        m_values: vec![10, 20, 40, 80],
        seeds: (0..20).collect(),
        resolution: DEFAULT_RESOLUTION,
    };
    let records = action_transfer_check(&cfg)?;
    let dist = median_by_m(&records, |r| r.lhs);
    let gamma = median_by_m(&records, |r| r.gamma.unwrap_or(f64::NAN));
    println!("{:>5} {:>14} {:>14}", "m", "median dist", "median ratio");
    for ((m, d), (_, g)) in dist.iter().zip(&gamma) {
        println!("{m:>5} {d:>14.6e} {g:>14.6}");
    }
    Ok(())
}

//! Output transferability on the constant-0.5 graphon: median `‖Y − Y_m‖`
//! against the bound, per graph size and recurrence depth.

use netsampler::grnn::{Grnn, GrnnDims};
use netsampler::rng::seeded;
use netsampler::topology::GraphonSpec;
use netsampler::transfer::{
    default_signals, median_by_m, normalize_filters, output_transfer_check, ConstantOverrides, OutputCheckConfig,
    DEFAULT_EPSILON, DEFAULT_RESOLUTION,
};

fn main() -> netsampler::Result<()> {
    for t in [1, 2] {
        let mut net = Grnn::random(GrnnDims { f: 1, h: 1, g: 1, t, l: 3 }, &mut seeded(11, t as u64));
        normalize_filters(&mut net);
        let cfg = OutputCheckConfig {
            graphon: GraphonSpec::Constant { p: 0.5 },
            net,
            signals: default_signals(t, 0),
            m_values: vec![10, 20, 40, 80],
            seeds: (0..20).collect(),
            resolution: DEFAULT_RESOLUTION,
            epsilon: DEFAULT_EPSILON,
            overrides: ConstantOverrides::default(),
        };
        let records = output_transfer_check(&cfg)?;
        let lhs = median_by_m(&records, |r| r.lhs);
        let rhs = median_by_m(&records, |r| r.rhs);
        let violations = records.iter().filter(|r| r.violation).count();
        println!("T = {t}  ({violations} violations of {} runs)", records.len());
        println!("{:>5} {:>14} {:>14}", "m", "median lhs", "median rhs");
        for ((m, l), (_, r)) in lhs.iter().zip(&rhs) {
            println!("{m:>5} {l:>14.6e} {r:>14.6e}");
        }
        let worst = records.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
        println!("max lhs/rhs = {worst:.4}");
    }
    Ok(())
}

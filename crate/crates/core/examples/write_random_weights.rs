//! Writes a randomly initialized weight file in the trainer exchange
//! format. The bundled `assets/random_weights.json` was produced with the
//! default arguments.
//!
//! ```text
//! cargo run --example write_random_weights -- [path] [seed]
//! ```

use netsampler::grnn::{save_weights_file, GrnnDims, GrnnWeights};
use netsampler::rng::seeded;

fn main() -> netsampler::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "random_weights.json".into());
    let seed: u64 = args.next().map_or(Ok(2024), |s| s.parse()).expect("seed must be an integer");
    let weights = GrnnWeights::random(GrnnDims::default(), &mut seeded(seed, 0));
    save_weights_file(&weights, &path)?;
    let d = weights.dims();
    println!("wrote {path}: F={} H={} G={} T={} L={} (seed {seed})", d.f, d.h, d.g, d.t, d.l);
    Ok(())
}

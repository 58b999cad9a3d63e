//! Evaluates one fixed weight file, without retraining, on Watts–Strogatz
//! graphs of growing size next to the uniform and age-based baselines.
//!
//! ```text
//! cargo run --release --example transfer_sweep -- [weights.json] [episodes]
//! ```

use std::sync::Arc;

use netsampler::grnn::load_weights_file;
use netsampler::harness::{
    transfer_sweep, write_sweep_csv, EpisodeConfig, PolicyKind, PolicySpec, ResampleRule, Seeds, SweepConfig,
};

fn main() -> netsampler::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(std::path::PathBuf::from).unwrap_or_else(|| {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/random_weights.json")
    });
    let episodes = args.next().map_or(Ok(5), |s| s.parse()).expect("episodes must be an integer");
    let cfg = SweepConfig {
        template: EpisodeConfig {
            steps: 256,
            seeds: Seeds::all(11),
            ..EpisodeConfig::default()
        },
        m_values: vec![10, 20, 30, 40, 50],
        episodes,
        baselines: vec![PolicySpec::of(PolicyKind::Uniform), PolicySpec::of(PolicyKind::Age)],
        resample: ResampleRule::Auto,
    };
    let rows = transfer_sweep(&cfg, Some(Arc::new(load_weights_file(&path)?)))?;
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}

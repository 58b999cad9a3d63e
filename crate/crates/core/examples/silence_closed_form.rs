//! ASEE of the all-silent policy against `(M−1)/M · (K+1)/2`.
//!
//! With nobody transmitting, `Δ[i][j] = k` in slot `k`, so the expected
//! normalized error is known in closed form. Both reward modes are shown:
//! the expected mode is exact for every seed, the realized mode scatters
//! around it.

use netsampler::estimation::RewardMode;
use netsampler::harness::{evaluate_policy, EpisodeConfig, PolicyKind, PolicySpec, ResampleRule, Seeds};

fn main() -> netsampler::Result<()> {
    let (m, k) = (10usize, 1024u64);
    let closed = (m as f64 - 1.0) / m as f64 * (k as f64 + 1.0) / 2.0;
    println!("closed form: {closed}");
    for reward in [RewardMode::Expected, RewardMode::Realized] {
        let cfg = EpisodeConfig {
            steps: k,
            reward,
            seeds: Seeds::all(0),
            policy: PolicySpec::of(PolicyKind::Silence),
            ..EpisodeConfig::default()
        };
        let report = evaluate_policy(&cfg, 100, ResampleRule::Auto)?;
        let a = report.aggregate.asee;
        println!(
            "{reward:?}: mean {:.3} ± {:.3} (SE), relative error {:+.2}%",
            a.mean,
            a.se,
            100.0 * (a.mean - closed) / closed
        );
    }
    Ok(())
}

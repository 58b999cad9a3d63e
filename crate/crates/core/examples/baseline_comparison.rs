//! Silence, uniform and age-based baselines over 30 Watts–Strogatz(10)
//! episodes, with ±2 SE intervals.

use netsampler::harness::{evaluate_policy, EpisodeConfig, PolicyKind, PolicySpec, ResampleRule, Seeds};

fn main() -> netsampler::Result<()> {
    let episodes = 30;
    println!("{:<8} {:>10} {:>8} {:>22} {:>10} {:>10}", "policy", "ASEE", "SE", "±2 SE", "mean age", "collide");
    for kind in [PolicyKind::Silence, PolicyKind::Uniform, PolicyKind::Age] {
        let cfg = EpisodeConfig {
            seeds: Seeds::all(1),
            policy: PolicySpec::of(kind),
            ..EpisodeConfig::default()
        };
        let r = evaluate_policy(&cfg, episodes, ResampleRule::Auto)?;
        let a = &r.aggregate;
        let (lo, hi) = a.asee.interval(2.0);
        println!(
            "{:<8} {:>10.3} {:>8.3} {:>10.3}..{:<10.3} {:>10.3} {:>10.3}",
            kind.name(),
            a.asee.mean,
            a.asee.se,
            lo,
            hi,
            a.mean_age.mean,
            a.collision_rate.mean
        );
    }
    Ok(())
}

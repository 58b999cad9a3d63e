use netsampler::estimation::{expected_reward, RewardMode};
use netsampler::harness::Stat;
use netsampler::mac::{Decision, MuDomain, Simulator};
use netsampler::policy::{observe, Policy, UniformPolicy};
use netsampler::rng::{node_rng, seeded, stream};
use netsampler::topology::Topology;

/// With the policy randomness fixed, an oblivious policy produces the same
/// age trajectory for every noise seed, so the realized reward averaged
/// over noise must match `−σ²/M² Σ Δ`.
#[test]
fn realized_reward_mean_matches_ages() {
    let (t, sigma, slots, episodes) = (Topology::path(4), 1.3, 6, 100_000u64);
    let mut per_slot: Vec<Vec<f64>> = vec![Vec::with_capacity(episodes as usize); slots];
    let mut expected = vec![0.0; slots];
    for e in 0..episodes {
        let mut sim = Simulator::new(t.clone(), sigma, MuDomain::Full, RewardMode::Realized);
        let mut noise = seeded(e, stream::NOISE);
        let mut policy = UniformPolicy::default();
        let mut rngs: Vec<_> = (0..4).map(|i| node_rng(7, i)).collect();
        for k in 0..slots {
            let d: Vec<Decision> = (0..4).map(|i| policy.decide(&observe(&sim, i), &mut rngs[i])).collect();
            let step = sim.step(&d, &mut noise).unwrap();
            per_slot[k].push(step.reward);
            let want = expected_reward(sim.state(), sigma);
            if e == 0 {
                expected[k] = want;
            }
            assert_eq!(want, expected[k], "ages must not depend on the noise seed");
        }
    }
    for (k, rewards) in per_slot.iter().enumerate() {
        let s = Stat::of(rewards);
        let z = (s.mean - expected[k]).abs() / s.se;
        assert!(z <= 3.0, "slot {k}: {} vs {} ({z:.2} SE)", s.mean, expected[k]);
    }
}

#[test]
fn single_node_has_zero_asee() {
    let mut sim = Simulator::new(Topology::path(1), 1.0, MuDomain::Full, RewardMode::Realized);
    let mut noise = seeded(0, stream::NOISE);
    for _ in 0..20 {
        assert_eq!(sim.step(&[Decision::Silent], &mut noise).unwrap().reward, 0.0);
    }
}

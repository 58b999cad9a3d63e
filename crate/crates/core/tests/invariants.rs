mod common;

use nalgebra::DMatrix;
use netsampler::estimation::{expected_reward, RewardMode};
use netsampler::grnn::{masked_softmax, GrnnDims, GrnnPolicy, GrnnWeights};
use netsampler::harness::PolicyKind;
use netsampler::mac::{Decision, Feedback, MuDomain, Simulator};
use netsampler::policy::{observe, AgeBasedPolicy, Policy, SilencePolicy, UniformPolicy};
use netsampler::rng::{node_rng, seeded, stream};
use netsampler::topology::{generate_watts_strogatz, random_permutation, Topology};
use proptest::prelude::*;
use std::sync::Arc;

fn policy_of(kind: PolicyKind, seed: u64) -> Box<dyn Policy> {
    match kind {
        PolicyKind::Silence => Box::new(SilencePolicy),
        PolicyKind::Uniform => Box::new(UniformPolicy::default()),
        PolicyKind::Age => Box::new(AgeBasedPolicy::default()),
        PolicyKind::Grnn => {
            let dims = GrnnDims { h: 4, g: 3, ..GrnnDims::default() };
            Box::new(GrnnPolicy::new(Arc::new(GrnnWeights::random(dims, &mut seeded(seed, 9)))))
        }
    }
}

fn kinds() -> impl Strategy<Value = PolicyKind> {
    prop_oneof![
        Just(PolicyKind::Silence),
        Just(PolicyKind::Uniform),
        Just(PolicyKind::Age),
        Just(PolicyKind::Grnn)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn slot_pipeline_invariants(
        m in 5usize..12,
        seed in 0u64..10_000,
        kind in kinds(),
        neighbors_only in any::<bool>(),
    ) {
        let t = generate_watts_strogatz(m, 2, 0.4, seed).unwrap();
        let domain = if neighbors_only { MuDomain::Neighbors } else { MuDomain::Full };
        let mut sim = Simulator::new(t, 1.0, domain, RewardMode::Realized);
        let mut policy = policy_of(kind, seed);
        policy.reset(sim.topology());
        let mut noise = seeded(seed, stream::NOISE);
        let mut rngs: Vec<_> = (0..m).map(|i| node_rng(seed, i)).collect();
        for _ in 0..30 {
            let before = sim.state().ages();
            let d: Vec<Decision> = (0..m).map(|i| policy.decide(&observe(&sim, i), &mut rngs[i])).collect();
            let step = sim.step(&d, &mut noise).unwrap();
            let out = &step.outcome;
            // feedback NoTx iff silent; only senders get feedback
            for i in 0..m {
                prop_assert_eq!(out.feedback[i] == Feedback::NoTx, d[i].is_silent());
            }
            // delivered ⊆ attempted, and each delivery came from a success
            for del in &out.delivered {
                prop_assert!(out.attempted.iter().any(|&(s, dd)| s == del.sender && dd.receiver() == Some(del.receiver)));
                prop_assert_eq!(out.feedback[del.sender], Feedback::Success);
                prop_assert!(del.entry.stamp < sim.slot());
            }
            let successes = out.feedback.iter().filter(|f| **f == Feedback::Success).count();
            prop_assert_eq!(successes, out.delivered.len());
            // ages: zero diagonal, grow by at most one per slot
            let after = sim.state().ages();
            for i in 0..m {
                prop_assert_eq!(after[i][i], 0);
                for j in 0..m {
                    prop_assert!(after[i][j] <= before[i][j] + 1);
                    prop_assert!(after[i][j] <= sim.slot());
                }
            }
            prop_assert!(step.reward <= 0.0);
            prop_assert!(expected_reward(sim.state(), 1.0) <= 0.0);
        }
    }

    #[test]
    fn masked_softmax_is_a_distribution(
        m in 2usize..8,
        seed in 0u64..1000,
        shift in -50.0f64..50.0,
    ) {
        let mut rng = seeded(seed, 0);
        let scores = DMatrix::from_fn(m, m, |_, _| rand::Rng::random_range(&mut rng, -5.0..5.0));
        let mask = DMatrix::from_fn(m, m, |i, j| i == j || (i + j + seed as usize) % 3 == 0);
        let p = masked_softmax(&scores, &mask);
        prop_assert!((p.sum() - 1.0).abs() < 1e-12);
        for (v, ok) in p.iter().zip(mask.iter()) {
            prop_assert!(*v >= 0.0);
            if !ok { prop_assert_eq!(*v, 0.0); }
        }
        let q = masked_softmax(&scores.add_scalar(shift), &mask);
        prop_assert!(common::max_abs_diff(&p, &q) < 1e-12);
    }

    #[test]
    fn relabeling_preserves_degree_multiset(m in 3usize..20, seed in 0u64..1000) {
        let t = generate_watts_strogatz(m.max(5), 2, 0.5, seed).unwrap();
        let p = random_permutation(t.m(), &mut seeded(seed, stream::PERMUTATION));
        let tp = t.permute(&p).unwrap();
        let mut a = t.degree_sequence();
        let mut b = tp.degree_sequence();
        for i in 0..t.m() {
            prop_assert_eq!(t.degree(i), tp.degree(p[i]));
        }
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert_eq!(t.edge_count(), tp.edge_count());
        prop_assert!(tp.is_connected());
    }

    #[test]
    fn grnn_decisions_are_always_valid(m in 3usize..9, seed in 0u64..500) {
        let t = Topology::cycle(m);
        let mut policy = policy_of(PolicyKind::Grnn, seed);
        let mut sim = Simulator::new(t, 1.0, MuDomain::Full, RewardMode::Expected);
        policy.reset(sim.topology());
        let mut noise = seeded(seed, stream::NOISE);
        let mut rngs: Vec<_> = (0..m).map(|i| node_rng(seed, i)).collect();
        for _ in 0..10 {
            let d: Vec<Decision> = (0..m).map(|i| policy.decide(&observe(&sim, i), &mut rngs[i])).collect();
            prop_assert!(sim.step(&d, &mut noise).is_ok());
        }
    }
}

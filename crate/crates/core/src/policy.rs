//! Decentralized policy interface and the oblivious baselines.
//!
//! A policy sees one node's [`LocalObservation`] at a time. Observations
//! carry ages, feedback and topology but never process values, so every
//! policy built on this interface is oblivious.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::mac::{Decision, Feedback, MuDomain, Simulator};
use crate::topology::Topology;

#[derive(Debug, Clone)]
pub struct LocalObservation<'a> {
    pub node: usize,
    pub slot: u64,
    /// `Δ[i][j]` for every `j`; never-received origins have age `slot`.
    pub ages: Vec<u64>,
    pub feedback: Feedback,
    /// Origins with a cached packet, ascending, excluding the node itself.
    pub cached: Vec<usize>,
    pub topology: &'a Topology,
    pub domain: MuDomain,
}

impl LocalObservation<'_> {
    pub fn neighbors(&self) -> &[usize] {
        self.topology.neighbors(self.node)
    }

    /// Origins this node may put on the air, ascending.
    pub fn sendable_origins(&self) -> Vec<usize> {
        match self.domain {
            MuDomain::Full => {
                let mut v = self.cached.clone();
                let at = v.partition_point(|&o| o < self.node);
                v.insert(at, self.node);
                v
            }
            MuDomain::Neighbors => self
                .cached
                .iter()
                .copied()
                .filter(|&o| self.topology.has_edge(self.node, o))
                .collect(),
        }
    }
}

/// Builds node `i`'s observation from the simulator.
pub fn observe(sim: &Simulator, node: usize) -> LocalObservation<'_> {
    LocalObservation {
        node,
        slot: sim.slot(),
        ages: sim.state().age_row(node),
        feedback: sim.last_feedback()[node],
        cached: sim.state().cached_origins(node),
        topology: sim.topology(),
        domain: sim.domain(),
    }
}

/// Probability table over decisions.
pub type ActionDistribution = Vec<(Decision, f64)>;

pub fn sample_action(dist: &[(Decision, f64)], rng: &mut dyn RngCore) -> Decision {
    let total: f64 = dist.iter().map(|(_, p)| p).sum();
    let mut u = rng.random::<f64>() * total;
    for &(d, p) in dist {
        if u < p {
            return d;
        }
        u -= p;
    }
    dist.iter()
        .rev()
        .find(|(_, p)| *p > 0.0)
        .map_or(Decision::Silent, |(d, _)| *d)
}

pub trait Policy: Send {
    fn name(&self) -> String;

    /// Called at the start of every episode.
    fn reset(&mut self, _topology: &Topology) {}

    fn decide(&mut self, obs: &LocalObservation<'_>, rng: &mut dyn RngCore) -> Decision;
}

/// Never transmits.
#[derive(Debug, Clone, Copy, Default)]
pub struct SilencePolicy;

impl Policy for SilencePolicy {
    fn name(&self) -> String {
        "silence".into()
    }

    fn decide(&mut self, _obs: &LocalObservation<'_>, _rng: &mut dyn RngCore) -> Decision {
        Decision::Silent
    }
}

/// Picks a receiver uniformly among neighbors and, optionally, silence;
/// then an origin uniformly among everything it can send.
#[derive(Debug, Clone, Copy)]
pub struct UniformPolicy {
    pub include_silence: bool,
}

impl Default for UniformPolicy {
    fn default() -> Self {
        Self { include_silence: true }
    }
}

impl UniformPolicy {
    pub fn probabilities(&self, obs: &LocalObservation<'_>) -> ActionDistribution {
        let neighbors = obs.neighbors();
        let origins = obs.sendable_origins();
        if neighbors.is_empty() || origins.is_empty() {
            return vec![(Decision::Silent, 1.0)];
        }
        let options = neighbors.len() + usize::from(self.include_silence);
        let p_receiver = 1.0 / options as f64;
        let p_pair = p_receiver / origins.len() as f64;
        let mut dist = Vec::with_capacity(neighbors.len() * origins.len() + 1);
        if self.include_silence {
            dist.push((Decision::Silent, p_receiver));
        }
        for &receiver in neighbors {
            for &origin in &origins {
                dist.push((Decision::Transmit { origin, receiver }, p_pair));
            }
        }
        dist
    }
}

impl Policy for UniformPolicy {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn decide(&mut self, obs: &LocalObservation<'_>, rng: &mut dyn RngCore) -> Decision {
        sample_action(&self.probabilities(obs), rng)
    }
}

/// How the age-based baseline turns ages into origin weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgeWeighting {
    /// `1 / (1 + Δ)`
    #[default]
    Inverse,
    /// `exp(-Δ / temperature)`
    Softmax { temperature: f64 },
}

impl AgeWeighting {
    fn weights(self, ages: &[u64]) -> Vec<f64> {
        match self {
            AgeWeighting::Inverse => ages.iter().map(|&a| 1.0 / (1.0 + a as f64)).collect(),
            AgeWeighting::Softmax { temperature } => {
                let min = ages.iter().copied().min().unwrap_or(0) as f64;
                ages.iter()
                    .map(|&a| (-(a as f64 - min) / temperature).exp())
                    .collect()
            }
        }
    }
}

/// Always transmits when it has a neighbor; fresher packets are chosen
/// more often, and the node's own sample (age 0) most often.
#[derive(Debug, Clone, Copy, Default)]
pub struct AgeBasedPolicy {
    pub weighting: AgeWeighting,
}

impl AgeBasedPolicy {
    pub fn probabilities(&self, obs: &LocalObservation<'_>) -> ActionDistribution {
        let neighbors = obs.neighbors();
        let origins = obs.sendable_origins();
        if neighbors.is_empty() || origins.is_empty() {
            return vec![(Decision::Silent, 1.0)];
        }
        let ages: Vec<u64> = origins.iter().map(|&o| obs.ages[o]).collect();
        let weights = self.weighting.weights(&ages);
        let total: f64 = weights.iter().sum();
        let p_receiver = 1.0 / neighbors.len() as f64;
        let mut dist = Vec::with_capacity(neighbors.len() * origins.len());
        for &receiver in neighbors {
            for (&origin, &w) in origins.iter().zip(&weights) {
                dist.push((Decision::Transmit { origin, receiver }, p_receiver * w / total));
            }
        }
        dist
    }
}

impl Policy for AgeBasedPolicy {
    fn name(&self) -> String {
        "age".into()
    }

    fn decide(&mut self, obs: &LocalObservation<'_>, rng: &mut dyn RngCore) -> Decision {
        sample_action(&self.probabilities(obs), rng)
    }
}

//! Gauss–Markov sources, per-node packet caches, last-sample MMSE
//! estimates, ages of information, and the estimation-error reward.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Independent random walks `ζ_{k+1} = ζ_k + Λ_k`, `Λ_k ~ N(0, σ²)`, one
/// per node, all starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceEnsemble {
    sigma: f64,
    values: Vec<f64>,
    slot: u64,
}

impl SourceEnsemble {
    pub fn new(m: usize, sigma: f64) -> Self {
        Self {
            sigma,
            values: vec![0.0; m],
            slot: 0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Advances every source by one independent Gaussian increment.
    pub fn evolve<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for v in &mut self.values {
            let z: f64 = rng.sample(StandardNormal);
            *v += self.sigma * z;
        }
        self.slot += 1;
    }
}

/// A packet as held in a cache: the sampled value of `origin`'s process at
/// slot `stamp`. Packets are never modified in transit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub origin: usize,
    pub value: f64,
    pub stamp: u64,
}

/// Per-node caches holding the freshest packet per origin.
///
/// Ages are derived from stamps: `Δ[i][j] = k - τ_ij`, with a missing entry
/// read as `τ_ij = 0` and `Δ[i][i] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationState {
    m: usize,
    slot: u64,
    caches: Vec<Option<CacheEntry>>,
}

impl EstimationState {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            slot: 0,
            caches: vec![None; m * m],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn entry(&self, holder: usize, origin: usize) -> Option<&CacheEntry> {
        self.caches[holder * self.m + origin].as_ref()
    }

    /// Origins (other than `holder`) with a cached packet at `holder`.
    pub fn cached_origins(&self, holder: usize) -> Vec<usize> {
        (0..self.m)
            .filter(|&j| j != holder && self.entry(holder, j).is_some())
            .collect()
    }

    pub fn age(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 0;
        }
        self.slot - self.entry(i, j).map_or(0, |e| e.stamp)
    }

    pub fn age_row(&self, i: usize) -> Vec<u64> {
        (0..self.m).map(|j| self.age(i, j)).collect()
    }

    pub fn ages(&self) -> Vec<Vec<u64>> {
        (0..self.m).map(|i| self.age_row(i)).collect()
    }

    pub fn age_sum(&self) -> u64 {
        (0..self.m)
            .flat_map(|i| (0..self.m).map(move |j| (i, j)))
            .map(|(i, j)| self.age(i, j))
            .sum()
    }

    pub fn max_age(&self) -> u64 {
        (0..self.m)
            .flat_map(|i| (0..self.m).map(move |j| (i, j)))
            .map(|(i, j)| self.age(i, j))
            .max()
            .unwrap_or(0)
    }

    /// Stores `entry` at `receiver` if it is fresher than what is cached.
    /// Returns whether the cache changed; stale packets are dropped.
    pub fn deliver_packet(&mut self, receiver: usize, entry: CacheEntry) -> bool {
        debug_assert!(entry.stamp <= self.slot, "packet stamped in the future");
        if receiver == entry.origin {
            return false;
        }
        let slot = &mut self.caches[receiver * self.m + entry.origin];
        match slot {
            Some(existing) if existing.stamp >= entry.stamp => false,
            _ => {
                *slot = Some(entry);
                true
            }
        }
    }

    pub(crate) fn advance(&mut self) {
        self.slot += 1;
    }
}

/// MMSE estimate of `ζ_k^{(j)}` held by node `i`. For a driftless random
/// walk the conditional mean given the last sample is that sample.
pub fn mmse_estimate(state: &EstimationState, sources: &SourceEnsemble, i: usize, j: usize) -> f64 {
    if i == j {
        return sources.value(i);
    }
    state.entry(i, j).map_or(0.0, |e| e.value)
}

/// Sum over ordered pairs of the squared estimation error.
pub fn squared_error_sum(state: &EstimationState, sources: &SourceEnsemble) -> f64 {
    let m = state.m();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let e = sources.value(j) - mmse_estimate(state, sources, i, j);
            total += e * e;
        }
    }
    total
}

/// `r_k = -(1/M²) Σ_{i,j} (ζ_k^{(j)} - ζ̂_{j,k}^{(i)})²`.
pub fn instantaneous_reward(state: &EstimationState, sources: &SourceEnsemble) -> f64 {
    debug_assert_eq!(state.slot(), sources.slot());
    let m = state.m() as f64;
    -squared_error_sum(state, sources) / (m * m)
}

/// Expected reward given ages only: `-(σ²/M²) Σ Δ[i][j]`.
pub fn expected_reward(state: &EstimationState, sigma: f64) -> f64 {
    let m = state.m() as f64;
    -(sigma * sigma) * state.age_sum() as f64 / (m * m)
}

/// Which reward the environment reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Realized squared error.
    #[default]
    Realized,
    /// σ²-scaled ages, a lower-variance surrogate with the same mean.
    Expected,
}

/// Average sum of estimation errors over a reward trajectory.
pub fn asee(rewards: &[f64]) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::param("ASEE needs at least one slot"));
    }
    Ok(-rewards.iter().sum::<f64>() / rewards.len() as f64)
}

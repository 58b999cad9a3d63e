//! Bilinear-softmax action distribution over `(origin, receiver)` pairs.

use nalgebra::DMatrix;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::mac::Decision;
use crate::policy::{sample_action, ActionDistribution, LocalObservation};

/// Additive score for pairs the node may not choose.
pub const MASK_PENALTY: f64 = -1e9;

/// `ŷ ϑ ŷᵀ`: entry `(μ, ν)` scores sending origin `μ` to receiver `ν`.
pub fn action_scores(y: &DMatrix<f64>, theta: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if theta.nrows() != y.ncols() || theta.ncols() != y.ncols() {
        return Err(Error::param(format!(
            "action matrix is {}x{}, outputs have {} features",
            theta.nrows(),
            theta.ncols(),
            y.ncols()
        )));
    }
    Ok(y * theta * y.transpose())
}

/// Pairs valid for the observing node. Silence `(i, i)` is always valid.
pub fn action_mask(obs: &LocalObservation<'_>) -> DMatrix<bool> {
    let m = obs.topology.m();
    let mut mask = DMatrix::from_element(m, m, false);
    mask[(obs.node, obs.node)] = true;
    let origins = obs.sendable_origins();
    for &receiver in obs.neighbors() {
        for &origin in &origins {
            mask[(origin, receiver)] = true;
        }
    }
    mask
}

/// Softmax over all entries after adding [`MASK_PENALTY`] to invalid ones.
pub fn masked_softmax(scores: &DMatrix<f64>, mask: &DMatrix<bool>) -> DMatrix<f64> {
    let shifted = scores.zip_map(mask, |s, ok| if ok { s } else { s + MASK_PENALTY });
    let max = shifted.max();
    let mut p = shifted.map(|s| (s - max).exp());
    let total = p.sum();
    p /= total;
    p
}

pub fn masked_distribution(scores: &DMatrix<f64>, obs: &LocalObservation<'_>) -> ActionDistribution {
    let mask = action_mask(obs);
    let p = masked_softmax(scores, &mask);
    let mut dist = Vec::new();
    // column-major walk keeps the order stable: receiver, then origin
    for receiver in 0..p.ncols() {
        for origin in 0..p.nrows() {
            if mask[(origin, receiver)] {
                let d = Decision::from_pair(obs.node, origin, receiver).expect("mask admits only well-formed pairs");
                dist.push((d, p[(origin, receiver)]));
            }
        }
    }
    dist
}

pub fn sample_decision(scores: &DMatrix<f64>, obs: &LocalObservation<'_>, rng: &mut dyn RngCore) -> Decision {
    sample_action(&masked_distribution(scores, obs), rng)
}

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{action_scores, masked_distribution, GrnnWeights, ShiftNormalization, ShiftOperator};
use crate::error::Result;
use crate::mac::Decision;
use crate::policy::{sample_action, ActionDistribution, LocalObservation, Policy};
use crate::topology::Topology;

/// Input width of the actor's node signal.
pub const FEATURES: usize = 4;

/// Whether the actor's hidden state survives from one slot to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrentState {
    PerSlot,
    #[default]
    Persistent,
}

/// Node signal seen by node `i`'s actor. Row `j` is
/// `[ln(1 + Δ[i][j]), 1{j ∈ ∂_i}, 1{j = i}, feedback on row i]`.
pub fn node_features(obs: &LocalObservation<'_>) -> DMatrix<f64> {
    let m = obs.topology.m();
    let mut x = DMatrix::zeros(m, FEATURES);
    for j in 0..m {
        x[(j, 0)] = (obs.ages[j] as f64).ln_1p();
    }
    for &j in obs.neighbors() {
        x[(j, 1)] = 1.0;
    }
    x[(obs.node, 2)] = 1.0;
    x[(obs.node, 3)] = obs.feedback.signal();
    x
}

/// Executes shared GRNN weights as a decentralized policy: every node
/// runs the same actor on its own observation.
#[derive(Debug, Clone)]
pub struct GrnnPolicy {
    weights: Arc<GrnnWeights>,
    normalization: ShiftNormalization,
    recurrent: RecurrentState,
    shift: Option<ShiftOperator>,
    hidden: Vec<Option<DMatrix<f64>>>,
}

impl GrnnPolicy {
    pub fn new(weights: Arc<GrnnWeights>) -> Self {
        Self {
            weights,
            normalization: ShiftNormalization::NodeCount,
            recurrent: RecurrentState::Persistent,
            shift: None,
            hidden: Vec::new(),
        }
    }

    pub fn with_recurrent_state(mut self, recurrent: RecurrentState) -> Self {
        self.recurrent = recurrent;
        self
    }

    pub fn with_normalization(mut self, normalization: ShiftNormalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn weights(&self) -> &GrnnWeights {
        &self.weights
    }

    fn ensure_shift(&mut self, topology: &Topology) {
        if self.shift.as_ref().is_none_or(|s| super::Shift::size(s) != topology.m()) {
            self.reset(topology);
        }
    }

    /// Actor output `ŷ` and the updated hidden state for one observation.
    fn actor_output(&mut self, obs: &LocalObservation<'_>) -> Result<DMatrix<f64>> {
        self.ensure_shift(obs.topology);
        let x = node_features(obs);
        let inputs = vec![x; self.weights.dims().t];
        let shift = self.shift.as_ref().expect("shift built above");
        let z0 = match self.recurrent {
            RecurrentState::Persistent => self.hidden[obs.node].as_ref(),
            RecurrentState::PerSlot => None,
        };
        let (y, z) = self.weights.actor.forward_with_state(shift, &inputs, z0)?;
        if self.recurrent == RecurrentState::Persistent {
            self.hidden[obs.node] = Some(z);
        }
        Ok(y)
    }

    /// Masked action distribution for `obs`. With persistent recurrence this
    /// advances the node's hidden state, exactly as `decide` does.
    pub fn probabilities(&mut self, obs: &LocalObservation<'_>) -> Result<ActionDistribution> {
        let y = self.actor_output(obs)?;
        let scores = action_scores(&y, &self.weights.theta_action)?;
        Ok(masked_distribution(&scores, obs))
    }
}

impl Policy for GrnnPolicy {
    fn name(&self) -> String {
        "grnn".into()
    }

    fn reset(&mut self, topology: &Topology) {
        self.shift = Some(ShiftOperator::new(topology, self.normalization));
        self.hidden = vec![None; topology.m()];
    }

    fn decide(&mut self, obs: &LocalObservation<'_>, rng: &mut dyn RngCore) -> Decision {
        match self.probabilities(obs) {
            Ok(dist) => sample_action(&dist, rng),
            // Weight shapes are checked at load time, so this only fires
            // for a feature-width mismatch; stay off the air.
            Err(_) => Decision::Silent,
        }
    }
}

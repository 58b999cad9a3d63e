//! Decision alphabet, collision-channel resolution for one slot, and the
//! per-slot simulator pipeline.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    expected_reward, instantaneous_reward, CacheEntry, EstimationState, RewardMode, SourceEnsemble,
};
use crate::topology::Topology;

/// What a node does in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decision {
    Silent,
    /// Send the packet originated by `origin` to neighbor `receiver`. When
    /// `origin` is the sender itself, a fresh sample is taken.
    Transmit { origin: usize, receiver: usize },
}

impl Decision {
    /// `(μ, ν)` encoding: silence is `(i, i)`.
    pub fn to_pair(self, node: usize) -> (usize, usize) {
        match self {
            Decision::Silent => (node, node),
            Decision::Transmit { origin, receiver } => (origin, receiver),
        }
    }

    pub fn from_pair(node: usize, mu: usize, nu: usize) -> std::result::Result<Self, Violation> {
        if nu == node {
            if mu == node {
                Ok(Decision::Silent)
            } else {
                Err(Violation::MalformedSilence)
            }
        } else {
            Ok(Decision::Transmit {
                origin: mu,
                receiver: nu,
            })
        }
    }

    pub fn is_silent(self) -> bool {
        matches!(self, Decision::Silent)
    }

    pub fn receiver(self) -> Option<usize> {
        match self {
            Decision::Silent => None,
            Decision::Transmit { receiver, .. } => Some(receiver),
        }
    }
}

/// Which origins a node may transmit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuDomain {
    /// Own fresh samples plus any cached origin.
    #[default]
    Full,
    /// Only cached packets originated by a direct neighbor; no own samples.
    Neighbors,
}

/// Sender-side outcome of one slot. Receivers get no feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Feedback {
    #[default]
    NoTx,
    Success,
    Collision,
}

impl Feedback {
    /// Wire code: 0 no transmission, 1 success, 2 collision.
    pub fn code(self) -> u8 {
        match self {
            Feedback::NoTx => 0,
            Feedback::Success => 1,
            Feedback::Collision => 2,
        }
    }

    /// Scalar used as a network input feature.
    pub fn signal(self) -> f64 {
        match self {
            Feedback::NoTx => 0.0,
            Feedback::Success => 1.0,
            Feedback::Collision => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NodeOutOfRange,
    ReceiverNotAdjacent,
    OriginNotCached,
    OriginNotNeighbor,
    OwnSampleDisallowed,
    MalformedSilence,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::NodeOutOfRange => "node id out of range",
            Violation::ReceiverNotAdjacent => "receiver not adjacent",
            Violation::OriginNotCached => "origin not cached",
            Violation::OriginNotNeighbor => "origin not a neighbor",
            Violation::OwnSampleDisallowed => "own samples not allowed in this alphabet",
            Violation::MalformedSilence => "silent decision must use own id as origin",
        })
    }
}

pub fn validate_decision(
    d: Decision,
    node: usize,
    topology: &Topology,
    state: &EstimationState,
    domain: MuDomain,
) -> std::result::Result<(), Violation> {
    let Decision::Transmit { origin, receiver } = d else {
        return Ok(());
    };
    let m = topology.m();
    if node >= m || origin >= m || receiver >= m {
        return Err(Violation::NodeOutOfRange);
    }
    if !topology.has_edge(node, receiver) {
        return Err(Violation::ReceiverNotAdjacent);
    }
    if origin == node {
        return match domain {
            MuDomain::Full => Ok(()),
            MuDomain::Neighbors => Err(Violation::OwnSampleDisallowed),
        };
    }
    if domain == MuDomain::Neighbors && !topology.has_edge(node, origin) {
        return Err(Violation::OriginNotNeighbor);
    }
    if state.entry(node, origin).is_none() {
        return Err(Violation::OriginNotCached);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delivery {
    pub sender: usize,
    pub receiver: usize,
    pub entry: CacheEntry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub attempted: Vec<(usize, Decision)>,
    pub delivered: Vec<Delivery>,
    pub feedback: Vec<Feedback>,
}

impl SlotOutcome {
    pub fn collisions(&self) -> usize {
        self.feedback.iter().filter(|f| **f == Feedback::Collision).count()
    }
}

/// Resolves one slot of the collision channel.
///
/// A transmission `i -> ν` fails when two or more nodes address `ν`, or
/// when `ν` is simultaneously addressing `i`. Everything else succeeds and
/// is delivered within the slot. Own-sample transmissions carry the
/// sender's current value stamped with the current slot.
pub fn resolve_slot(
    decisions: &[Decision],
    topology: &Topology,
    state: &EstimationState,
    sources: &SourceEnsemble,
    domain: MuDomain,
) -> Result<SlotOutcome> {
    let m = topology.m();
    if decisions.len() != m {
        return Err(Error::param(format!(
            "{} decisions for {m} nodes",
            decisions.len()
        )));
    }
    for (node, &d) in decisions.iter().enumerate() {
        validate_decision(d, node, topology, state, domain)
            .map_err(|violation| Error::Decision { node, violation })?;
    }

    let targets: Vec<Option<usize>> = decisions.iter().map(|d| d.receiver()).collect();
    let mut load = vec![0usize; m];
    for r in targets.iter().flatten() {
        load[*r] += 1;
    }

    let mut outcome = SlotOutcome {
        attempted: Vec::new(),
        delivered: Vec::new(),
        feedback: vec![Feedback::NoTx; m],
    };
    for (sender, &d) in decisions.iter().enumerate() {
        let Decision::Transmit { origin, receiver } = d else {
            continue;
        };
        outcome.attempted.push((sender, d));
        let collided = load[receiver] >= 2 || targets[receiver] == Some(sender);
        if collided {
            outcome.feedback[sender] = Feedback::Collision;
            continue;
        }
        let entry = if origin == sender {
            CacheEntry {
                origin,
                value: sources.value(sender),
                stamp: state.slot(),
            }
        } else {
            *state.entry(sender, origin).expect("validated above")
        };
        outcome.feedback[sender] = Feedback::Success;
        outcome.delivered.push(Delivery {
            sender,
            receiver,
            entry,
        });
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub reward: f64,
    pub outcome: SlotOutcome,
}

/// One episode's channel, caches and sources.
#[derive(Debug, Clone)]
pub struct Simulator {
    topology: Topology,
    state: EstimationState,
    sources: SourceEnsemble,
    domain: MuDomain,
    reward_mode: RewardMode,
    last_feedback: Vec<Feedback>,
}

impl Simulator {
    pub fn new(topology: Topology, sigma: f64, domain: MuDomain, reward_mode: RewardMode) -> Self {
        let m = topology.m();
        Self {
            topology,
            state: EstimationState::new(m),
            sources: SourceEnsemble::new(m, sigma),
            domain,
            reward_mode,
            last_feedback: vec![Feedback::NoTx; m],
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn state(&self) -> &EstimationState {
        &self.state
    }

    pub fn sources(&self) -> &SourceEnsemble {
        &self.sources
    }

    pub fn domain(&self) -> MuDomain {
        self.domain
    }

    pub fn slot(&self) -> u64 {
        self.state.slot()
    }

    pub fn last_feedback(&self) -> &[Feedback] {
        &self.last_feedback
    }

    /// Runs one slot: channel resolution, cache updates, source evolution,
    /// then the reward on the post-update state. On a decision error the
    /// simulator is left untouched.
    pub fn step<R: Rng + ?Sized>(&mut self, decisions: &[Decision], noise: &mut R) -> Result<StepResult> {
        let outcome = resolve_slot(decisions, &self.topology, &self.state, &self.sources, self.domain)?;
        for d in &outcome.delivered {
            self.state.deliver_packet(d.receiver, d.entry);
        }
        self.state.advance();
        self.sources.evolve(noise);
        let reward = match self.reward_mode {
            RewardMode::Realized => instantaneous_reward(&self.state, &self.sources),
            RewardMode::Expected => expected_reward(&self.state, self.sources.sigma()),
        };
        self.last_feedback.clone_from(&outcome.feedback);
        Ok(StepResult { reward, outcome })
    }
}

//! Newline-delimited JSON environment protocol.
//!
//! Client messages:
//!
//! ```text
//! {"type":"reset","seed":7,"graph":{"kind":"watts_strogatz","m":10},"steps":1024,
//!  "sigma":1.0,"reward":"realized","mu_domain":"full"}
//! {"type":"act","decisions":[[mu,nu], ...]}        one pair per node; (i, i) is silence
//! ```
//!
//! Server replies, one line per request:
//!
//! ```text
//! {"type":"obs","version":1,"slot":0,"steps":1024,"adjacency":[[..]],"per_node":[{"ages":[..],"feedback":0,"cached":[..]}]}
//! {"type":"transition","reward":-0.9,"done":false,"outcome":{"feedback":[..],"delivered":[[s,r,origin,stamp]]},"obs":{..}}
//! {"type":"error","node":3,"why":"receiver not adjacent"}
//! ```
//!
//! A rejected `act` leaves the episode untouched.

use serde::{Deserialize, Serialize};

use super::episode::GraphSource;
use crate::error::Error;
use crate::estimation::RewardMode;
use crate::mac::{Decision, MuDomain, Simulator};
use crate::rng::{seeded, stream, SimRng};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Reset {
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        graph: GraphSource,
        #[serde(default = "default_steps")]
        steps: u64,
        #[serde(default = "default_sigma")]
        sigma: f64,
        #[serde(default)]
        reward: RewardMode,
        #[serde(default)]
        mu_domain: MuDomain,
    },
    Act {
        decisions: Vec<[usize; 2]>,
    },
}

fn default_steps() -> u64 {
    super::episode::DEFAULT_STEPS
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeObs {
    pub ages: Vec<u64>,
    pub feedback: u8,
    pub cached: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObsBody {
    pub slot: u64,
    pub steps: u64,
    pub adjacency: Vec<Vec<u8>>,
    pub per_node: Vec<NodeObs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeBody {
    pub feedback: Vec<u8>,
    /// `[sender, receiver, origin, stamp]`.
    pub delivered: Vec<[u64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Obs {
        version: u32,
        #[serde(flatten)]
        obs: ObsBody,
    },
    Transition {
        reward: f64,
        done: bool,
        outcome: OutcomeBody,
        obs: ObsBody,
    },
    Error {
        #[serde(skip_serializing_if = "Option::is_none")]
        node: Option<usize>,
        why: String,
    },
}

impl ServerMessage {
    fn error(why: impl Into<String>) -> Self {
        ServerMessage::Error {
            node: None,
            why: why.into(),
        }
    }
}

struct Episode {
    sim: Simulator,
    noise: SimRng,
    steps: u64,
}

/// One client session: a single simulator, reset on demand.
#[derive(Default)]
pub struct Session {
    episode: Option<Episode>,
}

fn obs_body(ep: &Episode) -> ObsBody {
    let sim = &ep.sim;
    let m = sim.topology().m();
    ObsBody {
        slot: sim.slot(),
        steps: ep.steps,
        adjacency: sim.topology().adjacency_rows(),
        per_node: (0..m)
            .map(|i| NodeObs {
                ages: sim.state().age_row(i),
                feedback: sim.last_feedback()[i].code(),
                cached: sim.state().cached_origins(i),
            })
            .collect(),
    }
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn simulator(&self) -> Option<&Simulator> {
        self.episode.as_ref().map(|e| &e.sim)
    }

    /// Handles one request line and returns the reply line (no newline).
    pub fn handle_line(&mut self, line: &str) -> String {
        let reply = match serde_json::from_str::<ClientMessage>(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => ServerMessage::error(format!("malformed message: {e}")),
        };
        serde_json::to_string(&reply).expect("server messages serialize")
    }

    pub fn handle(&mut self, msg: ClientMessage) -> ServerMessage {
        match msg {
            ClientMessage::Reset {
                seed,
                graph,
                steps,
                sigma,
                reward,
                mu_domain,
            } => self.reset(seed, &graph, steps, sigma, reward, mu_domain),
            ClientMessage::Act { decisions } => self.act(&decisions),
        }
    }

    fn reset(
        &mut self,
        seed: u64,
        graph: &GraphSource,
        steps: u64,
        sigma: f64,
        reward: RewardMode,
        mu_domain: MuDomain,
    ) -> ServerMessage {
        if steps == 0 {
            return ServerMessage::error("steps must be >= 1");
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return ServerMessage::error("sigma must be finite and nonnegative");
        }
        let topology = match graph.build(seed) {
            Ok(t) => t,
            Err(e) => return ServerMessage::error(e.to_string()),
        };
        let ep = Episode {
            sim: Simulator::new(topology, sigma, mu_domain, reward),
            noise: seeded(seed, stream::NOISE),
            steps,
        };
        let obs = obs_body(&ep);
        self.episode = Some(ep);
        ServerMessage::Obs {
            version: PROTOCOL_VERSION,
            obs,
        }
    }

    fn act(&mut self, pairs: &[[usize; 2]]) -> ServerMessage {
        let Some(ep) = self.episode.as_mut() else {
            return ServerMessage::error("no active episode; send reset first");
        };
        if ep.sim.slot() >= ep.steps {
            return ServerMessage::error("episode is done; send reset");
        }
        let m = ep.sim.topology().m();
        if pairs.len() != m {
            return ServerMessage::error(format!("expected {m} decisions, got {}", pairs.len()));
        }
        let mut decisions = Vec::with_capacity(m);
        for (node, &[mu, nu]) in pairs.iter().enumerate() {
            match Decision::from_pair(node, mu, nu) {
                Ok(d) => decisions.push(d),
                Err(v) => {
                    return ServerMessage::Error {
                        node: Some(node),
                        why: v.to_string(),
                    }
                }
            }
        }
        match ep.sim.step(&decisions, &mut ep.noise) {
            Ok(step) => {
                let outcome = OutcomeBody {
                    feedback: step.outcome.feedback.iter().map(|f| f.code()).collect(),
                    delivered: step
                        .outcome
                        .delivered
                        .iter()
                        .map(|d| [d.sender as u64, d.receiver as u64, d.entry.origin as u64, d.entry.stamp])
                        .collect(),
                };
                ServerMessage::Transition {
                    reward: step.reward,
                    done: ep.sim.slot() >= ep.steps,
                    outcome,
                    obs: obs_body(ep),
                }
            }
            Err(Error::Decision { node, violation }) => ServerMessage::Error {
                node: Some(node),
                why: violation.to_string(),
            },
            Err(e) => ServerMessage::error(e.to_string()),
        }
    }
}

//! Experiment configuration files (TOML or JSON). Every command-line flag
//! has a field here; flags given on the command line win over the file.
//!
//! ```toml
//! steps = 1024
//! seed = 7
//! episodes = 30
//! out_csv = "episodes.csv"
//! out_json = "summary.json"
//!
//! [graph]
//! kind = "watts_strogatz"
//! m = 10
//!
//! [policy]
//! kind = "age"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::episode::{EpisodeConfig, GraphSource, PolicyKind, PolicySpec, ResampleRule, Seeds, DEFAULT_STEPS};
use super::report::SweepConfig;
use crate::error::{Error, Result};
use crate::estimation::RewardMode;
use crate::mac::MuDomain;
use crate::transfer::LabConfig;

pub const SEED_ENV: &str = "NETSAMPLER_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSection {
    pub m_values: Vec<usize>,
    pub baselines: Vec<PolicyKind>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            m_values: vec![10, 20, 30, 40, 50],
            baselines: vec![PolicyKind::Uniform, PolicyKind::Age],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub steps: u64,
    pub sigma: f64,
    /// Base seed for graph, noise and policy streams.
    pub seed: Option<u64>,
    /// Explicit per-stream seeds; override `seed`.
    pub seeds: Option<Seeds>,
    pub policy: PolicySpec,
    pub reward: RewardMode,
    pub mu_domain: MuDomain,
    pub episodes: u64,
    pub resample: ResampleRule,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub sweep: SweepSection,
    pub lab: LabConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::default(),
            steps: DEFAULT_STEPS,
            sigma: 1.0,
            seed: None,
            seeds: None,
            policy: PolicySpec::default(),
            reward: RewardMode::Realized,
            mu_domain: MuDomain::Full,
            episodes: 30,
            resample: ResampleRule::Auto,
            out_csv: None,
            out_json: None,
            sweep: SweepSection::default(),
            lab: LabConfig::default(),
        }
    }
}

/// Reads `NETSAMPLER_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

impl ExperimentConfig {
    /// Parses TOML or JSON, chosen by extension (`.json` is JSON, anything
    /// else TOML).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Seeds after applying the fallback chain: explicit `seeds`, then
    /// `seed`, then `NETSAMPLER_SEED`, then 0. The resolved values are
    /// written back so that outputs record them.
    pub fn resolve_seeds(&mut self) -> Result<Seeds> {
        let seeds = match (self.seeds, self.seed) {
            (Some(s), _) => s,
            (None, Some(s)) => Seeds::all(s),
            (None, None) => Seeds::all(seed_from_env()?.unwrap_or(0)),
        };
        self.seeds = Some(seeds);
        Ok(seeds)
    }

    pub fn episode(&mut self) -> Result<EpisodeConfig> {
        let seeds = self.resolve_seeds()?;
        let cfg = EpisodeConfig {
            graph: self.graph.clone(),
            steps: self.steps,
            sigma: self.sigma,
            seeds,
            policy: self.policy.clone(),
            reward: self.reward,
            mu_domain: self.mu_domain,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sweep(&mut self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            template: self.episode()?,
            m_values: self.sweep.m_values.clone(),
            episodes: self.episodes,
            baselines: self.sweep.baselines.iter().map(|&k| PolicySpec::of(k)).collect(),
            resample: self.resample,
        })
    }
}

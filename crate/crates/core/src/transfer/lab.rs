//! Parameter sweeps over the transferability checks, as run by the
//! `transfer-lab` command.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bounds::normalize_filters;
use super::checks::{
    action_transfer_check, default_signals, output_transfer_check, ActionCheckConfig, ConstantOverrides,
    OutputCheckConfig, TransferRecord, DEFAULT_EPSILON, DEFAULT_RESOLUTION,
};
use crate::error::{Error, Result};
use crate::grnn::{Grnn, GrnnDims};
use crate::rng::seeded;
use crate::topology::GraphonSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabConfig {
    pub graphon: GraphonSpec,
    pub m_values: Vec<usize>,
    /// Runs use seeds `0..seeds`.
    pub seeds: u64,
    /// Recurrence depths; one fixed random network per depth.
    pub depths: Vec<usize>,
    pub resolution: usize,
    pub epsilon: f64,
    /// Filter taps per layer.
    pub taps: usize,
    pub net_seed: u64,
    pub output_check: bool,
    pub action_check: bool,
    /// Scalar `ϑ` of the action check.
    pub theta: f64,
    pub overrides: ConstantOverrides,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            graphon: GraphonSpec::Constant { p: 0.5 },
            m_values: vec![10, 20, 40, 80],
            seeds: 20,
            depths: vec![1, 2],
            resolution: DEFAULT_RESOLUTION,
            epsilon: DEFAULT_EPSILON,
            taps: 3,
            net_seed: 0,
            output_check: true,
            action_check: true,
            theta: 1.5,
            overrides: ConstantOverrides::default(),
        }
    }
}

/// Fixed random scalar network of depth `t`, taps normalized so that every
/// frequency response stays within `[-1, 1]`.
pub fn lab_network(t: usize, taps: usize, seed: u64) -> Grnn {
    let mut net = Grnn::random(GrnnDims { f: 1, h: 1, g: 1, t, l: taps }, &mut seeded(seed, t as u64));
    normalize_filters(&mut net);
    net
}

pub fn run_lab(cfg: &LabConfig) -> Result<Vec<TransferRecord>> {
    if cfg.depths.is_empty() || cfg.depths.contains(&0) || cfg.taps == 0 {
        return Err(Error::Config("lab needs positive depths and tap counts".into()));
    }
    cfg.graphon.validate()?;
    let seeds: Vec<u64> = (0..cfg.seeds).collect();
    let mut records = Vec::new();
    for &t in &cfg.depths {
        let net = lab_network(t, cfg.taps, cfg.net_seed);
        if cfg.output_check {
            records.extend(output_transfer_check(&OutputCheckConfig {
                graphon: cfg.graphon.clone(),
                net: net.clone(),
                signals: default_signals(t, 0),
                m_values: cfg.m_values.clone(),
                seeds: seeds.clone(),
                resolution: cfg.resolution,
                epsilon: cfg.epsilon,
                overrides: cfg.overrides,
            })?);
        }
        if cfg.action_check {
            records.extend(action_transfer_check(&ActionCheckConfig {
                graphon: cfg.graphon.clone(),
                net,
                first: default_signals(t, 0),
                second: default_signals(t, 3),
                theta: DMatrix::from_element(1, 1, cfg.theta),
                m_values: cfg.m_values.clone(),
                seeds: seeds.clone(),
                resolution: cfg.resolution,
            })?);
        }
    }
    Ok(records)
}

//! CSV and JSON outputs. Floats are written with a fixed number of
//! decimals so that identical runs produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::episode::{evaluate_with, EpisodeConfig, EpisodeRow, PolicyFactory, PolicySpec, ResampleRule, RunReport, Stat};
use crate::error::Result;
use crate::grnn::GrnnWeights;

pub const EPISODE_COLUMNS: [&str; 13] = [
    "episode",
    "policy",
    "m",
    "edges",
    "graph_seed",
    "noise_seed",
    "policy_seed",
    "steps",
    "asee",
    "mean_age",
    "max_age",
    "collision_rate",
    "delivery_rate",
];

pub(crate) fn fixed(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9}")
    } else {
        v.to_string()
    }
}

pub fn write_episode_csv(rows: &[EpisodeRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EPISODE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.episode.to_string(),
            r.policy.clone(),
            r.m.to_string(),
            r.edges.to_string(),
            r.seeds.graph.to_string(),
            r.seeds.noise.to_string(),
            r.seeds.policy.to_string(),
            r.steps.to_string(),
            fixed(r.asee),
            fixed(r.mean_age),
            r.max_age.to_string(),
            fixed(r.collision_rate),
            fixed(r.delivery_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Summary document: the configuration that produced the run, the
/// aggregate, and the number of episodes.
pub fn summary_json<C: Serialize>(config: &C, report: &RunReport) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "config": config,
        "policy": report.policy,
        "aggregate": report.aggregate,
    }))
}

/// Writes the per-episode CSV and/or the JSON summary.
pub fn write_run_outputs<C: Serialize>(
    config: &C,
    report: &RunReport,
    csv_path: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<()> {
    if let Some(p) = csv_path {
        let mut buf = Vec::new();
        write_episode_csv(&report.rows, &mut buf)?;
        std::fs::write(p, buf)?;
    }
    if let Some(p) = json_path {
        let mut bytes = serde_json::to_vec_pretty(&summary_json(config, report)?)?;
        bytes.push(b'\n');
        std::fs::write(p, bytes)?;
    }
    Ok(())
}

/// One policy at one graph size in a transfer sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub policy: String,
    pub asee: Stat,
    /// `ASEE(uniform) − ASEE(policy)` when the uniform baseline is in the sweep.
    pub gap_vs_uniform: Option<f64>,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub template: EpisodeConfig,
    pub m_values: Vec<usize>,
    pub episodes: u64,
    /// Baselines evaluated next to the fixed weights.
    pub baselines: Vec<PolicySpec>,
    #[serde(default)]
    pub resample: ResampleRule,
}

/// Evaluates fixed weights, without retraining, at every graph size next
/// to the baselines. Each `(m, policy)` cell uses the same episode seeds.
pub fn transfer_sweep(cfg: &SweepConfig, weights: Option<std::sync::Arc<GrnnWeights>>) -> Result<Vec<SweepRow>> {
    let mut factories: Vec<PolicyFactory> = cfg.baselines.iter().map(PolicyFactory::new).collect::<Result<_>>()?;
    if let Some(w) = weights {
        factories.push(PolicyFactory::from_weights(w));
    }
    let mut out = Vec::new();
    for &m in &cfg.m_values {
        let template = EpisodeConfig {
            graph: cfg.template.graph.with_m(m)?,
            ..cfg.template.clone()
        };
        let mut cells = Vec::new();
        for f in &factories {
            let report = evaluate_with(&template, f, cfg.episodes, cfg.resample)?;
            cells.push((f.name().to_string(), report));
        }
        let uniform = cells.iter().find(|(n, _)| n == "uniform").map(|(_, r)| r.aggregate.asee.mean);
        for (policy, report) in cells {
            out.push(SweepRow {
                m,
                asee: report.aggregate.asee,
                gap_vs_uniform: uniform.map(|u| u - report.aggregate.asee.mean),
                policy,
                report,
            });
        }
    }
    Ok(out)
}

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "policy", "episodes", "asee_mean", "asee_se", "gap_vs_uniform", "mean_age", "collision_rate"])?;
    for r in rows {
        let a = &r.report.aggregate;
        w.write_record([
            r.m.to_string(),
            r.policy.clone(),
            a.episodes.to_string(),
            fixed(r.asee.mean),
            fixed(r.asee.se),
            r.gap_vs_uniform.map(fixed).unwrap_or_default(),
            fixed(a.mean_age.mean),
            fixed(a.collision_rate.mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::episode::{evaluate_policy, PolicyKind};

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let cfg = EpisodeConfig {
            steps: 64,
            policy: PolicySpec::of(PolicyKind::Age),
            ..EpisodeConfig::default()
        };
        let render = || {
            let r = evaluate_policy(&cfg, 4, ResampleRule::Auto).unwrap();
            let mut buf = Vec::new();
            write_episode_csv(&r.rows, &mut buf).unwrap();
            buf
        };
        let a = render();
        assert_eq!(a, render());
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("episode,policy,m,edges,graph_seed"));
    }

    #[test]
    fn sweep_reports_gap() {
        let cfg = SweepConfig {
            template: EpisodeConfig {
                steps: 32,
                ..EpisodeConfig::default()
            },
            m_values: vec![8, 12],
            episodes: 2,
            baselines: vec![PolicySpec::of(PolicyKind::Uniform), PolicySpec::of(PolicyKind::Silence)],
            resample: ResampleRule::Auto,
        };
        let rows = transfer_sweep(&cfg, None).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].gap_vs_uniform, Some(0.0));
        assert!(rows[1].gap_vs_uniform.unwrap() < 0.0);
        assert_eq!(rows[2].report.rows[0].m, 12);
    }
}

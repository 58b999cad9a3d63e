//! Empirical checks of output and action-distribution transferability.
//!
//! Each run samples a graph from the graphon, lifts it back to an induced
//! step kernel, and compares the WRNN on the graphon against the same
//! network on the induced kernel with induced input signals. Runs are pure
//! functions of `(m, seed)` and are spread over threads.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bounds::{band_constants, filter_constants, BoundComponents};
use super::kernel::{
    induce_signal, kernel_distance, sample_signal, wrnn_forward, DiscretizedKernel, GraphonSignal, TestSignal,
};
use crate::error::{Error, Result};
use crate::grnn::Grnn;
use crate::topology::{induce_graphon, sample_from_graphon, GraphonSpec};

pub const DEFAULT_RESOLUTION: usize = 1024;
pub const DEFAULT_EPSILON: f64 = 0.25;

/// Replaces computed bound constants with declared values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantOverrides {
    pub omega_lipschitz: Option<f64>,
    pub omega_band: Option<f64>,
    pub kappa: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputCheckConfig {
    pub graphon: GraphonSpec,
    /// Scalar network (`F = G = 1`).
    pub net: Grnn,
    /// One input signal per recurrence step.
    pub signals: Vec<TestSignal>,
    pub m_values: Vec<usize>,
    pub seeds: Vec<u64>,
    pub resolution: usize,
    pub epsilon: f64,
    pub overrides: ConstantOverrides,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionCheckConfig {
    pub graphon: GraphonSpec,
    pub net: Grnn,
    pub first: Vec<TestSignal>,
    pub second: Vec<TestSignal>,
    /// `ϑ`, `G x G`.
    pub theta: DMatrix<f64>,
    pub m_values: Vec<usize>,
    pub seeds: Vec<u64>,
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Output,
    Action,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Output => "output",
            CheckKind::Action => "action",
        }
    }
}

/// One `(m, seed)` run. For output checks `lhs = ‖Y − Y_m‖` and `rhs` is the
/// bound. For action checks `lhs` is the sup-grid distance between limit
/// action densities, `rhs = ‖ϑ‖ (‖Y⁽²⁾‖ + ‖Y_m⁽¹⁾‖) η₃` without the unknown
/// constant, and `gamma = lhs / rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub check: CheckKind,
    pub graphon: String,
    pub m: usize,
    pub seed: u64,
    pub n: usize,
    pub t: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta3: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub eta3: Option<f64>,
    pub violation: bool,
    pub gamma: Option<f64>,
    pub bound: Option<BoundComponents>,
}

/// Graph sampled at one `(m, seed)` with its lifted kernel.
struct Sample {
    labels: Vec<f64>,
    kernel: DiscretizedKernel,
}

fn sample(graphon: &GraphonSpec, m: usize, seed: u64, n: usize) -> Result<Sample> {
    let g = sample_from_graphon(graphon, m, seed)?;
    let kernel = DiscretizedKernel::from_induced(&induce_graphon(&g), n);
    Ok(Sample { labels: g.labels, kernel })
}

/// Graphon signals `X_t` and their induced counterparts `X_{t,m}`.
fn signal_pair(signals: &[TestSignal], labels: &[f64], n: usize) -> Result<(Vec<GraphonSignal>, Vec<GraphonSignal>)> {
    let full = signals.iter().map(|x| GraphonSignal::discretize(x, n)).collect();
    let induced = signals
        .iter()
        .map(|x| Ok(GraphonSignal::discretize(&induce_signal(&sample_signal(x, labels), labels)?, n)))
        .collect::<Result<_>>()?;
    Ok((full, induced))
}

fn check_common(net: &Grnn, lengths: &[usize], m_values: &[usize], n: usize) -> Result<()> {
    if net.dims.f != 1 || net.dims.g != 1 {
        return Err(Error::param("transferability checks use scalar networks (F = G = 1)"));
    }
    if lengths.iter().any(|&l| l != net.dims.t) {
        return Err(Error::param(format!("need {} input signals per sequence", net.dims.t)));
    }
    if m_values.is_empty() || m_values.contains(&0) || n == 0 {
        return Err(Error::param("m values and resolution must be positive"));
    }
    Ok(())
}

/// Runs `job` over every `(m, seed)` pair; results come back in `m`-major,
/// seed-minor order regardless of scheduling.
fn run_grid<T: Send>(m_values: &[usize], seeds: &[u64], job: impl Fn(usize, u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let tasks: Vec<(usize, u64)> = m_values.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();
    crate::parallel::map_ordered(&tasks, |&(m, s)| job(m, s))
}

pub fn output_transfer_check(cfg: &OutputCheckConfig) -> Result<Vec<TransferRecord>> {
    check_common(&cfg.net, &[cfg.signals.len()], &cfg.m_values, cfg.resolution)?;
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(Error::param("epsilon must lie in (0, 1]"));
    }
    let n = cfg.resolution;
    let limit = DiscretizedKernel::from_graphon(&cfg.graphon, n);
    let limit_spectrum = limit.spectrum();
    let full: Vec<GraphonSignal> = cfg.signals.iter().map(|x| GraphonSignal::discretize(x, n)).collect();
    let y = wrnn_forward(&cfg.net, &limit, &full)?;
    let eta1 = full.iter().map(GraphonSignal::norm).fold(0.0, f64::max);
    let (omega, band) = filter_constants(&cfg.net, cfg.epsilon);
    let o = cfg.overrides;

    run_grid(&cfg.m_values, &cfg.seeds, |m, seed| {
        let s = sample(&cfg.graphon, m, seed, n)?;
        let (_, induced) = signal_pair(&cfg.signals, &s.labels, n)?;
        let ym = wrnn_forward(&cfg.net, &s.kernel, &induced)?;
        let lhs = y.distance(&ym)?;
        let mut eta2: f64 = 0.0;
        for (a, b) in full.iter().zip(&induced) {
            eta2 = eta2.max(a.distance(b)?);
        }
        let distance = kernel_distance(&limit, &s.kernel)?;
        let (kappa, delta) = band_constants(&limit_spectrum, &s.kernel.spectrum(), cfg.epsilon);
        let bound = BoundComponents::new(
            o.omega_lipschitz.unwrap_or(omega),
            o.omega_band.unwrap_or(band),
            cfg.epsilon,
            o.kappa.unwrap_or(kappa),
            o.delta.unwrap_or(delta),
            distance,
        );
        let rhs = bound.rhs(cfg.net.dims.t, eta1, eta2);
        Ok(TransferRecord {
            check: CheckKind::Output,
            graphon: cfg.graphon.name(),
            m,
            seed,
            n,
            t: cfg.net.dims.t,
            lhs,
            rhs,
            theta1: Some(bound.theta1),
            theta2: Some(bound.theta2),
            theta3: Some(bound.theta3),
            eta1: Some(eta1),
            eta2: Some(eta2),
            eta3: None,
            violation: lhs > rhs,
            gamma: None,
            bound: Some(bound),
        })
    })
}

/// Limit action density on the grid: `exp(Y⁽¹⁾(u) ϑ Y⁽²⁾(v)ᵀ)` normalized
/// to integrate to one over `[0,1]²`, the continuous counterpart of the
/// softmax over all (origin, receiver) pairs.
pub fn limit_action_density(y1: &DMatrix<f64>, y2: &DMatrix<f64>, theta: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if y1.shape() != y2.shape() || theta.shape() != (y1.ncols(), y1.ncols()) {
        return Err(Error::param("action density needs n x G signals and a G x G matrix"));
    }
    let scores = y1 * theta * y2.transpose();
    let peak = scores.max();
    let mut density = scores.map(|s| (s - peak).exp());
    let mean = density.mean();
    density /= mean;
    Ok(density)
}

/// `sup |Ã(Y⁽¹⁾, Y⁽²⁾) − Ã_m(Y_m⁽¹⁾, Y_m⁽²⁾)|` over the grid.
pub fn action_distance(
    y1: &GraphonSignal,
    y2: &GraphonSignal,
    y1m: &GraphonSignal,
    y2m: &GraphonSignal,
    theta: &DMatrix<f64>,
) -> Result<f64> {
    let a = limit_action_density(&y1.as_column(), &y2.as_column(), theta)?;
    let b = limit_action_density(&y1m.as_column(), &y2m.as_column(), theta)?;
    if a.shape() != b.shape() {
        return Err(Error::param("grid resolutions differ"));
    }
    Ok((a - b).amax())
}

/// Largest singular value of `ϑ`.
pub fn spectral_norm(theta: &DMatrix<f64>) -> f64 {
    theta.singular_values().iter().fold(0.0, |a, &s| a.max(s))
}

/// Outputs `(Y⁽¹⁾, Y⁽²⁾, Y_m⁽¹⁾, Y_m⁽²⁾)` for one sampled graph.
pub struct ActionOutputs {
    pub y1: GraphonSignal,
    pub y2: GraphonSignal,
    pub y1m: GraphonSignal,
    pub y2m: GraphonSignal,
}

pub fn action_outputs(cfg: &ActionCheckConfig, m: usize, seed: u64) -> Result<ActionOutputs> {
    check_common(&cfg.net, &[cfg.first.len(), cfg.second.len()], &[m], cfg.resolution)?;
    let n = cfg.resolution;
    let limit = DiscretizedKernel::from_graphon(&cfg.graphon, n);
    let s = sample(&cfg.graphon, m, seed, n)?;
    outputs_on(cfg, &limit, &s)
}

fn outputs_on(cfg: &ActionCheckConfig, limit: &DiscretizedKernel, s: &Sample) -> Result<ActionOutputs> {
    let n = cfg.resolution;
    let (f1, i1) = signal_pair(&cfg.first, &s.labels, n)?;
    let (f2, i2) = signal_pair(&cfg.second, &s.labels, n)?;
    Ok(ActionOutputs {
        y1: wrnn_forward(&cfg.net, limit, &f1)?,
        y2: wrnn_forward(&cfg.net, limit, &f2)?,
        y1m: wrnn_forward(&cfg.net, &s.kernel, &i1)?,
        y2m: wrnn_forward(&cfg.net, &s.kernel, &i2)?,
    })
}

pub fn action_transfer_check(cfg: &ActionCheckConfig) -> Result<Vec<TransferRecord>> {
    check_common(&cfg.net, &[cfg.first.len(), cfg.second.len()], &cfg.m_values, cfg.resolution)?;
    let n = cfg.resolution;
    let limit = DiscretizedKernel::from_graphon(&cfg.graphon, n);
    let theta_norm = spectral_norm(&cfg.theta);

    run_grid(&cfg.m_values, &cfg.seeds, |m, seed| {
        let s = sample(&cfg.graphon, m, seed, n)?;
        let out = outputs_on(cfg, &limit, &s)?;
        let lhs = action_distance(&out.y1, &out.y2, &out.y1m, &out.y2m, &cfg.theta)?;
        let eta3 = out.y1.distance(&out.y1m)?.max(out.y2.distance(&out.y2m)?);
        let rhs = theta_norm * (out.y2.norm() + out.y1m.norm()) * eta3;
        let gamma = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(TransferRecord {
            check: CheckKind::Action,
            graphon: cfg.graphon.name(),
            m,
            seed,
            n,
            t: cfg.net.dims.t,
            lhs,
            rhs,
            theta1: None,
            theta2: None,
            theta3: None,
            eta1: None,
            eta2: None,
            eta3: Some(eta3),
            violation: false,
            gamma: Some(gamma),
            bound: None,
        })
    })
}

/// Median of `values`; `NaN` for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// `(m, median of field)` for each distinct `m`, in first-seen order.
pub fn median_by_m(records: &[TransferRecord], field: impl Fn(&TransferRecord) -> f64) -> Vec<(usize, f64)> {
    let mut ms: Vec<usize> = Vec::new();
    for r in records {
        if !ms.contains(&r.m) {
            ms.push(r.m);
        }
    }
    ms.into_iter()
        .map(|m| {
            let vals: Vec<f64> = records.iter().filter(|r| r.m == m).map(&field).collect();
            (m, median(&vals))
        })
        .collect()
}

pub const REPORT_COLUMNS: [&str; 16] = [
    "graphon",
    "m",
    "seed",
    "n",
    "lhs",
    "rhs",
    "theta1",
    "theta2",
    "theta3",
    "eta1",
    "eta2",
    "eta3",
    "violation_flag",
    "check",
    "t",
    "gamma",
];

fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn optional(v: Option<f64>) -> String {
    v.map(number).unwrap_or_default()
}

/// CSV report, one row per record. Numbers use a fixed 13-significant-digit
/// format so that output is byte-identical across runs.
pub fn write_transfer_csv(records: &[TransferRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in records {
        w.write_record([
            r.graphon.clone(),
            r.m.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            number(r.lhs),
            number(r.rhs),
            optional(r.theta1),
            optional(r.theta2),
            optional(r.theta3),
            optional(r.eta1),
            optional(r.eta2),
            optional(r.eta3),
            u8::from(r.violation).to_string(),
            r.check.name().to_string(),
            r.t.to_string(),
            optional(r.gamma),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Smooth default inputs: low-order Fourier modes, distinct per step.
pub fn default_signals(t: usize, offset: u32) -> Vec<TestSignal> {
    (0..t)
        .map(|k| {
            let k = k as u32 + offset;
            TestSignal::fourier(0.5, &[(0.3, 1 + k % 2, 0.4 * k as f64), (0.15, 2 + k % 3, 1.0 + 0.3 * k as f64)])
        })
        .collect()
}

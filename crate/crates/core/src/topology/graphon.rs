use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Provenance, Topology};
use crate::error::{Error, Result};
use crate::rng::{seeded, stream};

/// A symmetric kernel `W: [0,1]^2 -> [0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphonSpec {
    /// `W(u, v) = p`; the Erdős–Rényi limit.
    Constant { p: f64 },
    /// Dense-limit stand-in for Watts–Strogatz: pairs within circular
    /// distance `bandwidth / 2` keep their lattice link with probability
    /// `1 - beta`, and every pair also receives rewired mass `beta * bandwidth`.
    WattsStrogatzLimit { bandwidth: f64, beta: f64 },
    /// Block kernel with block measures summing to one.
    StochasticBlock {
        measures: Vec<f64>,
        probs: Vec<Vec<f64>>,
    },
    /// Piecewise-constant kernel on a uniform `b x b` grid.
    StepFunction { values: Vec<Vec<f64>> },
}

impl GraphonSpec {
    /// Two-block SBM graphon with equal block measures.
    pub fn two_block(p_in: f64, p_out: f64) -> Self {
        GraphonSpec::StochasticBlock {
            measures: vec![0.5, 0.5],
            probs: vec![vec![p_in, p_out], vec![p_out, p_in]],
        }
    }

    /// Step kernel whose `b x b` grid is the adjacency of `t`. Sampling it
    /// at the cell midpoints with `m = b` reproduces `t`.
    pub fn from_topology(t: &Topology) -> Self {
        let rows = t
            .adjacency_rows()
            .into_iter()
            .map(|r| r.into_iter().map(f64::from).collect())
            .collect();
        GraphonSpec::StepFunction { values: rows }
    }

    pub fn name(&self) -> String {
        match self {
            GraphonSpec::Constant { p } => format!("constant({p})"),
            GraphonSpec::WattsStrogatzLimit { bandwidth, beta } => {
                format!("ws_limit({bandwidth},{beta})")
            }
            GraphonSpec::StochasticBlock { measures, .. } => format!("sbm({})", measures.len()),
            GraphonSpec::StepFunction { values } => format!("step({})", values.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        match self {
            GraphonSpec::Constant { p } => {
                if !unit(*p) {
                    return Err(Error::param(format!("graphon value {p} outside [0, 1]")));
                }
            }
            GraphonSpec::WattsStrogatzLimit { bandwidth, beta } => {
                if !unit(*bandwidth) || !unit(*beta) {
                    return Err(Error::param("ws_limit bandwidth and beta must lie in [0, 1]"));
                }
            }
            GraphonSpec::StochasticBlock { measures, probs } => {
                let b = measures.len();
                if b == 0 || probs.len() != b || probs.iter().any(|r| r.len() != b) {
                    return Err(Error::param("block matrix must be B x B with B block measures"));
                }
                if measures.iter().any(|&x| x <= 0.0) || (measures.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::param("block measures must be positive and sum to 1"));
                }
                check_symmetric_unit(probs)?;
            }
            GraphonSpec::StepFunction { values } => {
                let b = values.len();
                if b == 0 || values.iter().any(|r| r.len() != b) {
                    return Err(Error::param("step kernel must be a non-empty square grid"));
                }
                check_symmetric_unit(values)?;
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            GraphonSpec::Constant { p } => *p,
            GraphonSpec::WattsStrogatzLimit { bandwidth, beta } => {
                let d = (u - v).abs();
                let circular = d.min(1.0 - d);
                let base = beta * bandwidth;
                if circular <= bandwidth / 2.0 {
                    (1.0 - beta) + base
                } else {
                    base
                }
            }
            GraphonSpec::StochasticBlock { measures, probs } => {
                probs[block_index(measures, u)][block_index(measures, v)]
            }
            GraphonSpec::StepFunction { values } => {
                let b = values.len();
                let cell = |x: f64| ((x * b as f64) as usize).min(b - 1);
                values[cell(u)][cell(v)]
            }
        }
    }
}

fn check_symmetric_unit(rows: &[Vec<f64>]) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::param(format!("kernel value {x} at ({i},{j}) outside [0, 1]")));
            }
            if x != rows[j][i] {
                return Err(Error::param(format!("kernel not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

fn block_index(measures: &[f64], x: f64) -> usize {
    let mut acc = 0.0;
    for (b, &w) in measures.iter().enumerate() {
        acc += w;
        if x < acc {
            return b;
        }
    }
    measures.len() - 1
}

/// A finite graph drawn from a graphon together with its sorted labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    pub topology: Topology,
    pub labels: Vec<f64>,
    pub graphon: GraphonSpec,
}

/// Draws `m` i.i.d. uniform labels, sorts them, and joins each pair
/// `i < j` independently with probability `W(u_i, u_j)`. The result is not
/// required to be connected; see [`SampledGraph::sample_connected`].
pub fn sample_from_graphon(w: &GraphonSpec, m: usize, seed: u64) -> Result<SampledGraph> {
    if m == 0 {
        return Err(Error::param("graphon sample needs m >= 1"));
    }
    w.validate()?;
    let mut rng = seeded(seed, stream::LABELS);
    let mut labels: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    labels.sort_by(f64::total_cmp);
    SampledGraph::at_labels(w, labels, seed)
}

impl SampledGraph {
    /// Samples edges for fixed labels. Labels must be strictly increasing
    /// and inside `[0, 1]`.
    pub fn at_labels(w: &GraphonSpec, labels: Vec<f64>, seed: u64) -> Result<Self> {
        w.validate()?;
        if labels.is_empty() {
            return Err(Error::param("graphon sample needs m >= 1"));
        }
        if labels.iter().any(|u| !(0.0..=1.0).contains(u)) || labels.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::param("labels must be strictly increasing within [0, 1]"));
        }
        let mut rng = seeded(seed, stream::GRAPH);
        let m = labels.len();
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let p = w.eval(labels[i], labels[j]);
                // Draw unconditionally so the stream position depends only on (i, j).
                let draw: f64 = rng.random();
                if draw < p {
                    edges.push((i, j));
                }
            }
        }
        let provenance = Provenance::new("graphon")
            .with_param("graphon", w)
            .with_param("m", m)
            .with_seed(seed);
        Ok(Self {
            topology: Topology::from_edges(m, edges, provenance)?,
            labels,
            graphon: w.clone(),
        })
    }

    /// Labels at the midpoints of the uniform `m`-cell partition.
    pub fn midpoint_labels(m: usize) -> Vec<f64> {
        (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect()
    }

    /// Resamples with derived seeds until the graph is connected.
    pub fn sample_connected(w: &GraphonSpec, m: usize, seed: u64) -> Result<Self> {
        for attempt in 0..super::MAX_CONNECT_ATTEMPTS {
            let g = sample_from_graphon(w, m, crate::rng::mix(seed, attempt))?;
            if g.topology.is_connected() {
                return Ok(g);
            }
        }
        Err(Error::Generation(format!(
            "no connected sample of {} with m={m}",
            w.name()
        )))
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }
}

/// Step kernel lifting a sampled graph back to `[0,1]^2`.
///
/// Node `i` (in label order) owns the cell bounded by the midpoints between
/// its label and its neighbors' labels; the first and last cells extend to
/// 0 and 1. Cell `(i, j)` carries `adjacency(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedGraphon {
    boundaries: Vec<f64>,
    values: DMatrix<f64>,
}

pub fn induce_graphon(g: &SampledGraph) -> InducedGraphon {
    InducedGraphon::new(&g.labels, &g.topology)
}

impl InducedGraphon {
    pub fn new(labels: &[f64], topology: &Topology) -> Self {
        Self {
            boundaries: label_partition(labels),
            values: topology.adjacency(),
        }
    }

    /// Cell boundaries `0 = b_0 < b_1 < ... < b_m = 1`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn cell_measures(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn cell_of(&self, u: f64) -> usize {
        cell_index(&self.boundaries, u)
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.values[(self.cell_of(u), self.cell_of(v))]
    }
}

/// Midpoint partition of `[0, 1]` for sorted labels.
pub(crate) fn label_partition(labels: &[f64]) -> Vec<f64> {
    let mut b = Vec::with_capacity(labels.len() + 1);
    b.push(0.0);
    b.extend(labels.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    b.push(1.0);
    b
}

/// Index of the half-open cell `[b_i, b_{i+1})` containing `u`; the last
/// cell is closed at 1.
pub(crate) fn cell_index(boundaries: &[f64], u: f64) -> usize {
    let cells = boundaries.len() - 1;
    boundaries[1..cells].partition_point(|&b| b <= u)
}

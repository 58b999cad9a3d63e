//! Network graphs: construction, relabeling, graphons and graphon sampling.

mod generators;
mod graphml;
pub(crate) mod graphon;

pub use generators::{generate_sbm, generate_watts_strogatz, MAX_CONNECT_ATTEMPTS};
pub use graphml::{load_topology_zoo, parse_graphml};
pub use graphon::{induce_graphon, sample_from_graphon, GraphonSpec, InducedGraphon, SampledGraph};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a topology came from. Stored alongside every graph so that runs
/// can be regenerated from their outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub generator: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>) -> Self {
        Self {
            generator: generator.into(),
            ..Self::default()
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Undirected simple graph on nodes `0..m`.
///
/// Edges are kept as sorted `(i, j)` pairs with `i < j`; neighbor lists are
/// sorted ascending. Both views are derived from the same edge set at
/// construction and never mutated afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    m: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    provenance: Provenance,
}

impl Topology {
    /// Builds a topology from an edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(
        m: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::param(format!("edge ({a}, {b}) out of range for m={m}")));
            }
            if a == b {
                return Err(Error::param(format!("self-loop at node {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); m];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            m,
            edges,
            neighbors,
            provenance,
        })
    }

    /// Complete graph on `m` nodes.
    pub fn complete(m: usize) -> Self {
        let edges = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j)));
        Self::from_edges(m, edges, Provenance::new("complete").with_param("m", m))
            .expect("complete graph edges are valid")
    }

    /// Path `0 - 1 - ... - (m-1)`.
    pub fn path(m: usize) -> Self {
        let edges = (1..m).map(|i| (i - 1, i));
        Self::from_edges(m, edges, Provenance::new("path").with_param("m", m))
            .expect("path edges are valid")
    }

    /// Cycle on `m >= 3` nodes.
    pub fn cycle(m: usize) -> Self {
        let edges = (0..m).map(|i| (i, (i + 1) % m));
        Self::from_edges(m, edges, Provenance::new("cycle").with_param("m", m))
            .expect("cycle edges are valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighborhood of node `i`, sorted ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.m && self.neighbors[i].binary_search(&j).is_ok()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.m, self.m);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// Row-major 0/1 adjacency, as sent over the wire.
    pub fn adjacency_rows(&self) -> Vec<Vec<u8>> {
        let mut rows = vec![vec![0u8; self.m]; self.m];
        for &(i, j) in &self.edges {
            rows[i][j] = 1;
            rows[j][i] = 1;
        }
        rows
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<_> = self.neighbors.iter().map(Vec::len).collect();
        degrees.sort_unstable();
        degrees
    }

    /// Connected components, each sorted ascending, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.m];
        let mut out = Vec::new();
        for start in 0..self.m {
            if seen[start] {
                continue;
            }
            let mut component = vec![start];
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        component.push(v);
                        queue.push_back(v);
                    }
                }
            }
            component.sort_unstable();
            out.push(component);
        }
        out
    }

    /// A graph with zero or one node counts as connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Relabels nodes so that node `i` becomes node `p[i]`.
    pub fn permute(&self, p: &[usize]) -> Result<Self> {
        validate_permutation(p, self.m)?;
        let edges = self.edges.iter().map(|&(a, b)| (p[a], p[b]));
        let provenance = self.provenance.clone().with_param("permutation", p);
        Self::from_edges(self.m, edges, provenance)
    }

    /// Subgraph induced by `nodes`; node `nodes[k]` becomes `k`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.m];
        for (k, &v) in nodes.iter().enumerate() {
            if v >= self.m {
                return Err(Error::param(format!("node {v} out of range")));
            }
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| index[*a] != usize::MAX && index[*b] != usize::MAX)
            .map(|&(a, b)| (index[a], index[b]));
        Self::from_edges(nodes.len(), edges, self.provenance.clone())
    }

    pub fn to_json(&self) -> TopologyJson {
        TopologyJson {
            m: self.m,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_json(json: &TopologyJson) -> Result<Self> {
        Self::from_edges(
            json.m,
            json.edges.iter().map(|e| (e[0], e[1])),
            json.provenance.clone(),
        )
    }
}

/// Graph exchange format shared by the CLI and the wire protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyJson {
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub provenance: Provenance,
}

pub fn validate_permutation(p: &[usize], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(Error::param(format!(
            "permutation has length {}, expected {m}",
            p.len()
        )));
    }
    let mut hit = vec![false; m];
    for &v in p {
        if v >= m || std::mem::replace(&mut hit[v], true) {
            return Err(Error::param("permutation is not a bijection"));
        }
    }
    Ok(())
}

pub fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

/// Uniformly random permutation of `0..m`.
pub fn random_permutation(m: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(rng);
    p
}

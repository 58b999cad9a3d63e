use rand::Rng;

use super::{Provenance, Topology};
use crate::error::{Error, Result};
use crate::rng::{seeded, stream, SimRng};

/// Upper bound on resampling attempts when a generator must return a
/// connected graph.
pub const MAX_CONNECT_ATTEMPTS: u64 = 1000;

/// Watts–Strogatz small-world graph, resampled until connected.
///
/// Each node starts joined to its `k/2` clockwise ring neighbors; each of
/// those lattice edges then has its far endpoint rewired with probability
/// `beta` to a uniformly chosen node that is not already adjacent. Rewiring
/// keeps the edge count at `m * k / 2`.
pub fn generate_watts_strogatz(m: usize, k: usize, beta: f64, seed: u64) -> Result<Topology> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::param(format!("lattice degree k={k} must be even and >= 2")));
    }
    if k >= m {
        return Err(Error::param(format!("lattice degree k={k} must be < m={m}")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param(format!("rewiring probability {beta} outside [0, 1]")));
    }
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let mut rng = seeded(seed, (stream::GRAPH << 32) | attempt);
        let edges = watts_strogatz_edges(m, k, beta, &mut rng);
        let provenance = Provenance::new("watts_strogatz")
            .with_param("m", m)
            .with_param("k", k)
            .with_param("beta", beta)
            .with_param("sub_seed", attempt)
            .with_seed(seed);
        let t = Topology::from_edges(m, edges, provenance)?;
        if t.is_connected() {
            return Ok(t);
        }
    }
    Err(Error::Generation(format!(
        "no connected Watts-Strogatz graph (m={m}, k={k}, beta={beta}) after {MAX_CONNECT_ATTEMPTS} attempts"
    )))
}

fn watts_strogatz_edges(m: usize, k: usize, beta: f64, rng: &mut SimRng) -> Vec<(usize, usize)> {
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in 1..=k / 2 {
            let v = (i + j) % m;
            adj[i][v] = true;
            adj[v][i] = true;
        }
    }
    if beta > 0.0 {
        for j in 1..=k / 2 {
            for i in 0..m {
                let v = (i + j) % m;
                if !adj[i][v] || !rng.random_bool(beta) {
                    continue;
                }
                let free: Vec<usize> = (0..m).filter(|&w| w != i && !adj[i][w]).collect();
                if free.is_empty() {
                    continue;
                }
                let w = free[rng.random_range(0..free.len())];
                adj[i][v] = false;
                adj[v][i] = false;
                adj[i][w] = true;
                adj[w][i] = true;
            }
        }
    }
    let mut edges = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        for (j, &on) in row.iter().enumerate().skip(i + 1) {
            if on {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Stochastic block model, resampled until connected. Nodes are assigned
/// to blocks contiguously in the order given by `block_sizes`.
pub fn generate_sbm(block_sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<Topology> {
    if block_sizes.is_empty() || block_sizes.iter().any(|&b| b == 0) {
        return Err(Error::param("every block needs at least one node"));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let block_of: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let m = block_of.len();
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let mut rng = seeded(seed, (stream::GRAPH << 32) | attempt);
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let p = if block_of[i] == block_of[j] { p_in } else { p_out };
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let provenance = Provenance::new("sbm")
            .with_param("blocks", block_sizes)
            .with_param("p_in", p_in)
            .with_param("p_out", p_out)
            .with_param("sub_seed", attempt)
            .with_seed(seed);
        let t = Topology::from_edges(m, edges, provenance)?;
        if t.is_connected() {
            return Ok(t);
        }
    }
    Err(Error::Generation(format!(
        "no connected SBM sample (blocks={block_sizes:?}, p_in={p_in}, p_out={p_out}) after {MAX_CONNECT_ATTEMPTS} attempts"
    )))
}

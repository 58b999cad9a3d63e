//! Graph filters and graph recurrent networks.
//!
//! A graph filter applies `Σ_l S^l X H_l` for a shift operator `S`, node
//! signal `X` (m × F_in) and tap matrices `H_l` (F_in × F_out). The
//! recurrent network stacks three such filters:
//!
//! ```text
//! Z_0 = 0
//! Z_t = ρ₁(B(S) X_t + C(S) Z_{t-1})     t = 1..T
//! Y   = ρ₂(D(S) Z_T)
//! ```
//!
//! Parameter counts depend only on feature widths and filter order, never
//! on the number of nodes, and every operation commutes with node
//! relabeling.

mod action;
mod policy;
mod weights;

pub use action::{action_mask, action_scores, masked_distribution, masked_softmax, sample_decision, MASK_PENALTY};
pub use policy::{node_features, GrnnPolicy, RecurrentState, FEATURES};
pub use weights::{load_weights, load_weights_file, save_weights, save_weights_file, FORMAT_VERSION};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::Topology;

/// Anything that can play the role of a shift operator on node signals.
pub trait Shift {
    fn size(&self) -> usize;
    /// Returns `S · x`.
    fn shift(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftNormalization {
    /// `S = A / m`, the scale of the induced graphon operator.
    #[default]
    NodeCount,
    /// `S = A / λ_max(A)`.
    SpectralRadius,
}

/// Sparse symmetric shift `scale · A` stored as neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    neighbors: Vec<Vec<usize>>,
    scale: f64,
}

impl ShiftOperator {
    pub fn new(topology: &Topology, normalization: ShiftNormalization) -> Self {
        let m = topology.m();
        let scale = match normalization {
            ShiftNormalization::NodeCount => 1.0 / m.max(1) as f64,
            ShiftNormalization::SpectralRadius => {
                let eig = topology.adjacency().symmetric_eigen();
                let radius = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
                if radius > 0.0 {
                    1.0 / radius
                } else {
                    1.0
                }
            }
        };
        Self {
            neighbors: (0..m).map(|i| topology.neighbors(i).to_vec()).collect(),
            scale,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.neighbors.len();
        let mut s = DMatrix::zeros(m, m);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                s[(i, j)] = self.scale;
            }
        }
        s
    }
}

impl Shift for ShiftOperator {
    fn size(&self) -> usize {
        self.neighbors.len()
    }

    fn shift(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                for c in 0..x.ncols() {
                    out[(i, c)] += x[(j, c)];
                }
            }
        }
        out * self.scale
    }
}

/// Polynomial graph filter with one `F_in × F_out` tap matrix per power.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFilter {
    taps: Vec<DMatrix<f64>>,
}

impl GraphFilter {
    pub fn new(taps: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = taps.first().ok_or_else(|| Error::param("filter needs at least one tap"))?;
        let shape = first.shape();
        if taps.iter().any(|t| t.shape() != shape) {
            return Err(Error::param("filter taps must share one shape"));
        }
        Ok(Self { taps })
    }

    /// Scalar filter (`F_in = F_out = 1`) from its coefficients.
    pub fn scalar(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| DMatrix::from_element(1, 1, c)).collect())
    }

    pub fn zeros(order: usize, fin: usize, fout: usize) -> Self {
        Self {
            taps: vec![DMatrix::zeros(fin, fout); order.max(1)],
        }
    }

    pub fn random(order: usize, fin: usize, fout: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / ((fin * order.max(1)) as f64).sqrt();
        let taps = (0..order.max(1))
            .map(|_| DMatrix::from_fn(fin, fout, |_, _| rng.random_range(-bound..bound)))
            .collect();
        Self { taps }
    }

    pub fn taps(&self) -> &[DMatrix<f64>] {
        &self.taps
    }

    pub fn order(&self) -> usize {
        self.taps.len()
    }

    pub fn fin(&self) -> usize {
        self.taps[0].nrows()
    }

    pub fn fout(&self) -> usize {
        self.taps[0].ncols()
    }

    /// Entry `(a, b)` of every tap: the scalar polynomial coupling input
    /// feature `a` to output feature `b`.
    pub fn coefficients(&self, a: usize, b: usize) -> Vec<f64> {
        self.taps.iter().map(|t| t[(a, b)]).collect()
    }

    /// `Σ_l S^l X H_l`, using `L - 1` shifts and no matrix powers.
    pub fn apply<S: Shift + ?Sized>(&self, s: &S, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != s.size() || x.ncols() != self.fin() {
            return Err(Error::param(format!(
                "filter expects {}x{} signal, got {}x{}",
                s.size(),
                self.fin(),
                x.nrows(),
                x.ncols()
            )));
        }
        let mut acc = x * &self.taps[0];
        let mut cur = x.clone();
        for tap in &self.taps[1..] {
            cur = s.shift(&cur);
            acc += &cur * tap;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Identity,
    Relu,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
            Activation::Relu => "relu",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "tanh" => Some(Activation::Tanh),
            "identity" => Some(Activation::Identity),
            "relu" => Some(Activation::Relu),
            _ => None,
        }
    }

    fn map(self, mut x: DMatrix<f64>) -> DMatrix<f64> {
        if self != Activation::Identity {
            x.apply(|v| *v = self.apply(*v));
        }
        x
    }
}

/// Layer widths and depths of a recurrent graph network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrnnDims {
    pub f: usize,
    pub h: usize,
    pub g: usize,
    pub t: usize,
    pub l: usize,
}

impl Default for GrnnDims {
    fn default() -> Self {
        Self {
            f: FEATURES,
            h: 16,
            g: 8,
            t: 2,
            l: 3,
        }
    }
}

/// A graph recurrent network: input filter `B`, state filter `C`, readout
/// filter `D`. With `T = 1` (or `C = 0`) it is a plain feedforward GNN.
#[derive(Debug, Clone, PartialEq)]
pub struct Grnn {
    pub dims: GrnnDims,
    pub b: GraphFilter,
    pub c: GraphFilter,
    pub d: GraphFilter,
    pub rho1: Activation,
    pub rho2: Activation,
}

impl Grnn {
    pub fn new(dims: GrnnDims, b: GraphFilter, c: GraphFilter, d: GraphFilter, rho1: Activation, rho2: Activation) -> Result<Self> {
        let check = |name: &str, f: &GraphFilter, fin: usize, fout: usize| {
            if f.order() != dims.l || f.fin() != fin || f.fout() != fout {
                Err(Error::weights(
                    name,
                    format!(
                        "expected {} taps of {fin}x{fout}, got {} taps of {}x{}",
                        dims.l,
                        f.order(),
                        f.fin(),
                        f.fout()
                    ),
                ))
            } else {
                Ok(())
            }
        };
        if dims.t == 0 {
            return Err(Error::weights("T", "recurrence depth must be >= 1"));
        }
        check("B", &b, dims.f, dims.h)?;
        check("C", &c, dims.h, dims.h)?;
        check("D", &d, dims.h, dims.g)?;
        Ok(Self { dims, b, c, d, rho1, rho2 })
    }

    pub fn random(dims: GrnnDims, rng: &mut impl Rng) -> Self {
        let b = GraphFilter::random(dims.l, dims.f, dims.h, rng);
        let c = GraphFilter::random(dims.l, dims.h, dims.h, rng);
        let d = GraphFilter::random(dims.l, dims.h, dims.g, rng);
        Self::new(dims, b, c, d, Activation::Tanh, Activation::Identity).expect("dims consistent")
    }

    pub fn forward<S: Shift + ?Sized>(&self, s: &S, inputs: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
        Ok(self.forward_with_state(s, inputs, None)?.0)
    }

    /// Runs the recursion from hidden state `z0` (zero when `None`) and
    /// returns `(Y, Z_T)`.
    pub fn forward_with_state<S: Shift + ?Sized>(
        &self,
        s: &S,
        inputs: &[DMatrix<f64>],
        z0: Option<&DMatrix<f64>>,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if inputs.len() != self.dims.t {
            return Err(Error::param(format!(
                "expected {} input signals, got {}",
                self.dims.t,
                inputs.len()
            )));
        }
        let mut z = match z0 {
            Some(z) if z.shape() == (s.size(), self.dims.h) => z.clone(),
            Some(z) => {
                return Err(Error::param(format!(
                    "hidden state is {}x{}, expected {}x{}",
                    z.nrows(),
                    z.ncols(),
                    s.size(),
                    self.dims.h
                )))
            }
            None => DMatrix::zeros(s.size(), self.dims.h),
        };
        for x in inputs {
            let pre = self.b.apply(s, x)? + self.c.apply(s, &z)?;
            z = self.rho1.map(pre);
        }
        let y = self.rho2.map(self.d.apply(s, &z)?);
        Ok((y, z))
    }
}

/// Shared actor weights plus the bilinear action matrix `ϑ` (G × G), and an
/// optional critic carried along for the trainer.
#[derive(Debug, Clone, PartialEq)]
pub struct GrnnWeights {
    pub actor: Grnn,
    pub theta_action: DMatrix<f64>,
    pub critic: Option<Grnn>,
}

impl GrnnWeights {
    pub fn new(actor: Grnn, theta_action: DMatrix<f64>, critic: Option<Grnn>) -> Result<Self> {
        let g = actor.dims.g;
        if theta_action.shape() != (g, g) {
            return Err(Error::weights(
                "theta_action",
                format!("expected {g}x{g}, got {}x{}", theta_action.nrows(), theta_action.ncols()),
            ));
        }
        Ok(Self { actor, theta_action, critic })
    }

    pub fn random(dims: GrnnDims, rng: &mut impl Rng) -> Self {
        let actor = Grnn::random(dims, rng);
        let theta = DMatrix::from_fn(dims.g, dims.g, |_, _| rng.random_range(-1.0..1.0));
        Self::new(actor, theta, None).expect("dims consistent")
    }

    pub fn dims(&self) -> GrnnDims {
        self.actor.dims
    }

    pub fn forward<S: Shift + ?Sized>(&self, s: &S, inputs: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
        self.actor.forward(s, inputs)
    }
}

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grnn::{Grnn, Shift};
use crate::topology::{GraphonSpec, InducedGraphon};

/// A kernel sampled at the midpoints of an `n`-cell grid on `[0, 1]`.
/// As an operator, `(T f)_a = (1/n) Σ_b K[a, b] f_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedKernel {
    values: DMatrix<f64>,
}

fn midpoint(a: usize, n: usize) -> f64 {
    (a as f64 + 0.5) / n as f64
}

impl DiscretizedKernel {
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            values: DMatrix::from_fn(n, n, |a, b| f(midpoint(a, n), midpoint(b, n))),
        }
    }

    pub fn from_graphon(w: &GraphonSpec, n: usize) -> Self {
        Self::from_fn(n, |u, v| w.eval(u, v))
    }

    pub fn from_induced(w: &InducedGraphon, n: usize) -> Self {
        let cells: Vec<usize> = (0..n).map(|a| w.cell_of(midpoint(a, n))).collect();
        let v = w.values();
        Self {
            values: DMatrix::from_fn(n, n, |a, b| v[(cells[a], cells[b])]),
        }
    }

    pub fn resolution(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        check_resolution(self.resolution(), other.resolution())?;
        Ok(Self {
            values: &self.values - &other.values,
        })
    }

    /// Nonzero part of the operator spectrum, descending.
    ///
    /// Runs of identical consecutive rows are merged first: with block
    /// counts `c` and merged kernel `V`, the nonzero eigenvalues of
    /// `K / n` are those of `C^{1/2} V C^{1/2} / n`. Step kernels therefore
    /// cost one small eigendecomposition instead of an `n x n` one.
    pub fn spectrum(&self) -> Vec<f64> {
        let n = self.resolution();
        let mut reps = Vec::new();
        let mut counts: Vec<f64> = Vec::new();
        for a in 0..n {
            if a > 0 && self.values.row(a) == self.values.row(a - 1) {
                *counts.last_mut().expect("run started") += 1.0;
            } else {
                reps.push(a);
                counts.push(1.0);
            }
        }
        let r = reps.len();
        let merged = DMatrix::from_fn(r, r, |g, h| {
            self.values[(reps[g], reps[h])] * (counts[g] * counts[h]).sqrt() / n as f64
        });
        let mut eig: Vec<f64> = merged
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .filter(|l| l.abs() > 1e-12)
            .collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        eig
    }

    /// `L²` operator norm, i.e. the largest singular value of `K / n`.
    pub fn operator_norm(&self) -> f64 {
        self.spectrum().iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }
}

impl Shift for DiscretizedKernel {
    fn size(&self) -> usize {
        self.resolution()
    }

    fn shift(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        (&self.values * x) / self.resolution() as f64
    }
}

pub(crate) fn check_resolution(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::param(format!("grid resolutions differ: {a} vs {b}")));
    }
    Ok(())
}

/// `‖A − B‖`, the operator norm of the difference kernel.
pub fn kernel_distance(a: &DiscretizedKernel, b: &DiscretizedKernel) -> Result<f64> {
    Ok(a.difference(b)?.operator_norm())
}

/// Something that can be evaluated as a function on `[0, 1]`.
pub trait SignalFn {
    fn eval(&self, u: f64) -> f64;
}

/// A piecewise-constant function on the `n`-cell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonSignal {
    values: DVector<f64>,
}

impl GraphonSignal {
    pub fn new(values: DVector<f64>) -> Self {
        Self { values }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: DVector::from_fn(n, |a, _| f(midpoint(a, n))),
        }
    }

    pub fn discretize(signal: &impl SignalFn, n: usize) -> Self {
        Self::from_fn(n, |u| signal.eval(u))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self {
            values: DVector::from_element(n, c),
        }
    }

    pub fn resolution(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// `‖X‖_{L²[0,1]} = sqrt((1/n) Σ x²)`.
    pub fn norm(&self) -> f64 {
        (self.values.norm_squared() / self.resolution() as f64).sqrt()
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_resolution(self.resolution(), other.resolution())?;
        Ok(GraphonSignal::new(&self.values - &other.values).norm())
    }

    pub fn as_column(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.resolution(), 1, self.values.as_slice())
    }

    /// `α·other + (1 − α)·self`.
    pub fn lerp(&self, other: &Self, alpha: f64) -> Result<Self> {
        check_resolution(self.resolution(), other.resolution())?;
        Ok(Self::new(&self.values + (&other.values - &self.values) * alpha))
    }
}

impl SignalFn for GraphonSignal {
    fn eval(&self, u: f64) -> f64 {
        let n = self.resolution();
        self.values[((u * n as f64) as usize).min(n - 1)]
    }
}

/// Piecewise-constant lift of a graph signal onto the label partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSignal {
    boundaries: Vec<f64>,
    values: Vec<f64>,
}

impl StepSignal {
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SignalFn for StepSignal {
    fn eval(&self, u: f64) -> f64 {
        self.values[crate::topology::graphon::cell_index(&self.boundaries, u)]
    }
}

/// Extends node values `x` to `[0, 1]`, constant on each node's cell of
/// the midpoint partition of `labels`.
pub fn induce_signal(x: &[f64], labels: &[f64]) -> Result<StepSignal> {
    if x.len() != labels.len() || x.is_empty() {
        return Err(Error::param("signal and labels must have the same non-zero length"));
    }
    if labels.windows(2).any(|w| w[0] >= w[1]) || labels.iter().any(|u| !(0.0..=1.0).contains(u)) {
        return Err(Error::param("labels must be strictly increasing within [0, 1]"));
    }
    Ok(StepSignal {
        boundaries: crate::topology::graphon::label_partition(labels),
        values: x.to_vec(),
    })
}

/// Evaluates a graphon signal at the node labels.
pub fn sample_signal(signal: &impl SignalFn, labels: &[f64]) -> Vec<f64> {
    labels.iter().map(|&u| signal.eval(u)).collect()
}

/// Smooth or piecewise test inputs for the transferability checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSignal {
    Constant { value: f64 },
    /// `offset + Σ a_k cos(2π f_k u + φ_k)`.
    Fourier { offset: f64, terms: Vec<FourierTerm> },
    Step(StepSignal),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub amplitude: f64,
    pub frequency: u32,
    pub phase: f64,
}

impl TestSignal {
    pub fn fourier(offset: f64, terms: &[(f64, u32, f64)]) -> Self {
        TestSignal::Fourier {
            offset,
            terms: terms
                .iter()
                .map(|&(amplitude, frequency, phase)| FourierTerm { amplitude, frequency, phase })
                .collect(),
        }
    }
}

impl SignalFn for TestSignal {
    fn eval(&self, u: f64) -> f64 {
        match self {
            TestSignal::Constant { value } => *value,
            TestSignal::Fourier { offset, terms } => {
                offset
                    + terms
                        .iter()
                        .map(|t| t.amplitude * (std::f64::consts::TAU * t.frequency as f64 * u + t.phase).cos())
                        .sum::<f64>()
            }
            TestSignal::Step(s) => s.eval(u),
        }
    }
}

/// The graphon counterpart of the GRNN: the same recursion with the shift
/// replaced by the kernel's integral operator. Scalar networks only.
pub fn wrnn_forward(w: &Grnn, k: &DiscretizedKernel, inputs: &[GraphonSignal]) -> Result<GraphonSignal> {
    if w.dims.f != 1 || w.dims.g != 1 {
        return Err(Error::param("graphon signals carry one feature; network must have F = G = 1"));
    }
    for x in inputs {
        check_resolution(k.resolution(), x.resolution())?;
    }
    let columns: Vec<DMatrix<f64>> = inputs.iter().map(GraphonSignal::as_column).collect();
    let y = w.forward(k, &columns)?;
    Ok(GraphonSignal::new(y.column(0).into_owned()))
}

//! Constants entering the GRNN transferability bound.
//!
//! The filter and spectral constants follow the usual graphon-filter
//! conventions and are computed, not assumed:
//!
//! - `Ω`: Lipschitz constant of the frequency responses `h(λ) = Σ h_l λ^l`
//!   on `[-1, 1]`, bounded by `Σ_l l |h_l|` and maximized over B, C, D.
//! - `ω`: low-band response scale, `ω ε = max Σ_l |h_l| ε^l`, which bounds
//!   `|h(λ)|` for `|λ| < ε`.
//! - `κ^ε`: largest `|λ|` of the sampled operator among eigenvalues with
//!   `|λ| >= ε` (zero when the band is empty).
//! - `δ^ε`: smallest gap `|λ_i − λ'_j|`, `j ≠ i`, between band eigenvalues
//!   of one operator and any eigenvalue of the other. Eigenvalues are
//!   indexed by sign and rank (positives descending, negatives ascending),
//!   and every graphon operator has zero in its spectrum.

use serde::{Deserialize, Serialize};

use crate::grnn::{GraphFilter, Grnn};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComponents {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub omega_lipschitz: f64,
    pub omega_band: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub delta: f64,
    pub kernel_distance: f64,
}

impl BoundComponents {
    pub fn new(omega_lipschitz: f64, omega_band: f64, epsilon: f64, kappa: f64, delta: f64, kernel_distance: f64) -> Self {
        let spectral = if kappa == 0.0 {
            0.0
        } else {
            std::f64::consts::PI * kappa / delta
        };
        let theta1 = if kernel_distance == 0.0 {
            0.0
        } else {
            (omega_lipschitz + spectral) * kernel_distance
        };
        Self {
            theta1,
            theta2: omega_lipschitz * epsilon + 2.0,
            theta3: 2.0 * omega_band * epsilon,
            omega_lipschitz,
            omega_band,
            epsilon,
            kappa,
            delta,
            kernel_distance,
        }
    }

    /// `T(1+T)/2 · (Θ₁ + Θ₃) η₁ + T Θ₂ η₂`.
    pub fn rhs(&self, depth: usize, eta1: f64, eta2: f64) -> f64 {
        let t = depth as f64;
        let accumulated = t * (1.0 + t) / 2.0;
        let sampling = if eta1 == 0.0 { 0.0 } else { accumulated * (self.theta1 + self.theta3) * eta1 };
        sampling + t * self.theta2 * eta2
    }
}

fn scalar_polynomials(f: &GraphFilter) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..f.fin()).flat_map(move |a| (0..f.fout()).map(move |b| f.coefficients(a, b)))
}

/// `Σ_l l |h_l|`, maximized over the filter's scalar polynomials.
pub fn lipschitz_constant(f: &GraphFilter) -> f64 {
    scalar_polynomials(f)
        .map(|h| h.iter().enumerate().map(|(l, c)| l as f64 * c.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Σ_l |h_l| ε^l`, maximized over the filter's scalar polynomials.
pub fn low_band_response(f: &GraphFilter, epsilon: f64) -> f64 {
    scalar_polynomials(f)
        .map(|h| h.iter().enumerate().map(|(l, c)| c.abs() * epsilon.powi(l as i32)).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(Ω, ω)` for a network at band edge `ε`.
pub fn filter_constants(net: &Grnn, epsilon: f64) -> (f64, f64) {
    let filters = [&net.b, &net.c, &net.d];
    let omega = filters.iter().map(|f| lipschitz_constant(f)).fold(0.0, f64::max);
    let band = filters.iter().map(|f| low_band_response(f, epsilon)).fold(0.0, f64::max);
    (omega, band / epsilon)
}

/// Rescales every filter so that `Σ_l |h_l| <= 1` for each scalar
/// polynomial, which keeps `|h(λ)| <= 1` on `[-1, 1]`.
pub fn normalize_filters(net: &mut Grnn) {
    for f in [&mut net.b, &mut net.c, &mut net.d] {
        let worst = scalar_polynomials(f)
            .map(|h| h.iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        if worst > 1.0 {
            let taps = f.taps().iter().map(|t| t / worst).collect();
            *f = GraphFilter::new(taps).expect("same shapes");
        }
    }
}

fn signed_ranks(spectrum: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pos: Vec<f64> = spectrum.iter().copied().filter(|&l| l > 0.0).collect();
    let mut neg: Vec<f64> = spectrum.iter().copied().filter(|&l| l < 0.0).collect();
    pos.sort_by(|a, b| b.total_cmp(a));
    neg.sort_by(f64::total_cmp);
    (pos, neg)
}

/// `(κ^ε, δ^ε)` for graphon spectrum `limit` and sampled spectrum `sampled`.
pub fn band_constants(limit: &[f64], sampled: &[f64], epsilon: f64) -> (f64, f64) {
    let kappa = sampled
        .iter()
        .filter(|l| l.abs() >= epsilon)
        .fold(0.0f64, |acc, l| acc.max(l.abs()));

    let (lp, ln) = signed_ranks(limit);
    let (sp, sn) = signed_ranks(sampled);
    // index > 0: k-th positive eigenvalue; index < 0: k-th negative one
    let at = |pos: &[f64], neg: &[f64], idx: i64| -> f64 {
        if idx > 0 {
            pos.get(idx as usize - 1).copied().unwrap_or(0.0)
        } else {
            neg.get((-idx) as usize - 1).copied().unwrap_or(0.0)
        }
    };
    let max_pos = lp.len().max(sp.len()) as i64;
    let max_neg = ln.len().max(sn.len()) as i64;
    let indices: Vec<i64> = (1..=max_pos).chain((1..=max_neg).map(|k| -k)).collect();

    let mut delta = f64::INFINITY;
    for &i in &indices {
        let (li, si) = (at(&lp, &ln, i), at(&sp, &sn, i));
        let (l_band, s_band) = (li.abs() >= epsilon, si.abs() >= epsilon);
        // zero sits in both spectra at some index other than i
        if l_band {
            delta = delta.min(li.abs());
        }
        if s_band {
            delta = delta.min(si.abs());
        }
        for &j in indices.iter().filter(|&&j| j != i) {
            let (lj, sj) = (at(&lp, &ln, j), at(&sp, &sn, j));
            if l_band {
                delta = delta.min((li - sj).abs());
            }
            if s_band {
                delta = delta.min((si - lj).abs());
            }
        }
    }
    (kappa, delta)
}

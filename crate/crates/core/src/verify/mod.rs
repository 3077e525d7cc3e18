//! Property scans over heat kernels: CK*, off-diagonal Gaussian decay, the
//! decomposition identities, the convolution off-diagonal lemma, the ψ-based
//! Gaussian bound and basis-change norm equivalence.
//!
//! A numerical scan cannot prove that a supremum over `(0, T)` is finite.
//! Scans are therefore judged by the trend of their small-`t` tail together
//! with certified endpoint values.

mod axioms;
mod ckstar;
mod convlemma;
mod decomposition;
mod equivalence;
mod offdiag;
mod psi;

pub use axioms::{
    centrality_check, element_coords, representation_check, semigroup_check, CentralityReport, RepresentationReport,
    SemigroupReport, GENERATOR_STEP, NORMALIZATION_TOL, SEMIGROUP_BLOCK_TOL, SEMIGROUP_SPATIAL_TOL,
};
pub use ckstar::{ck_star_circle_product, ck_star_scan, ck_star_scan_kernel, circle_product_tail, CircleProduct};
pub use convlemma::{conv_offdiag_lemma_check, ConvLemmaReport, FamilyMember};
pub use decomposition::{decomposition_check, DecompositionReport, BLOCK_TOL, SPATIAL_TOL};
pub use equivalence::{norm_equivalence_check, EquivalenceReport, FormBounds, RatioRange};
pub use offdiag::{off_diagonal_scan, OffDiagonalParams};
pub use psi::{psi_bound_fit, PsiFit};

use serde::Serialize;

use crate::group::{FactorKind, GroupElement, GroupSpec, Part};

/// Fraction of the scan supremum that any single certificate may reach
/// before a scan is refused a pass.
pub const CERTIFICATE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Decreasing,
    Bounded,
    Diverging,
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Trend::Decreasing => "decreasing",
            Trend::Bounded => "bounded",
            Trend::Diverging => "diverging",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    /// Names of the grid coordinates; the first is the scan variable.
    pub coords: Vec<String>,
    pub grid: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub certificates: Vec<f64>,
    pub sup: f64,
    pub trend: Trend,
    pub pass: bool,
}

impl ScanResult {
    /// Builds a scan whose grid is ordered towards the limit being probed
    /// (for `t ↓ 0`, decreasing `t`). `pass` starts as "not diverging and
    /// certified"; callers tighten it.
    pub fn new(coords: Vec<String>, grid: Vec<Vec<f64>>, values: Vec<f64>, certificates: Vec<f64>) -> Self {
        let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let x: Vec<f64> = grid.iter().map(|g| g[0]).collect();
        let trend = classify_trend(&x, &values);
        let mut r = ScanResult {
            coords,
            grid,
            values,
            certificates,
            sup,
            trend,
            pass: false,
        };
        r.pass = trend != Trend::Diverging && r.certified();
        r
    }

    /// Every certificate is at most `CERTIFICATE_FRACTION` of the supremum.
    pub fn certified(&self) -> bool {
        let bound = CERTIFICATE_FRACTION * self.sup.abs();
        self.certificates.iter().all(|c| c.is_finite() && *c <= bound)
    }

    pub fn last(&self) -> f64 {
        *self.values.last().unwrap_or(&f64::NAN)
    }

    /// Largest certificate over the scan.
    pub fn max_certificate(&self) -> f64 {
        self.certificates.iter().copied().fold(0.0, f64::max)
    }
}

/// Trend of the last `max(3, ⌈n/3⌉)` points: least-squares slope `β` of
/// `ln v` against `ln x`, with values floored at `1e-300 · sup`.
///
/// * diverging: `β < -0.25` and the last value is the largest of the tail;
/// * decreasing: `β > 0.25` and the last value is the smallest of the tail;
/// * bounded otherwise (including scans that are identically zero).
pub fn classify_trend(x: &[f64], values: &[f64]) -> Trend {
    let n = values.len();
    let sup = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if n < 3 || sup == 0.0 || !sup.is_finite() {
        return if sup.is_finite() { Trend::Bounded } else { Trend::Diverging };
    }
    let m = 3.max(n.div_ceil(3)).min(n);
    let floor = (1e-300 * sup).max(f64::MIN_POSITIVE);
    let lx: Vec<f64> = x[n - m..].iter().map(|v| v.abs().max(f64::MIN_POSITIVE).ln()).collect();
    let ly: Vec<f64> = values[n - m..].iter().map(|v| v.abs().max(floor).ln()).collect();
    let mx = lx.iter().sum::<f64>() / m as f64;
    let my = ly.iter().sum::<f64>() / m as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Trend::Bounded;
    }
    let beta = sxy / sxx;
    let tail = &values[n - m..];
    let last = tail[m - 1].abs();
    if beta < -0.25 && tail.iter().all(|v| v.abs() <= last) {
        Trend::Diverging
    } else if beta > 0.25 && tail.iter().all(|v| v.abs() >= last) {
        Trend::Decreasing
    } else {
        Trend::Bounded
    }
}

/// Log-spaced grid from `t_max` down to `t_min` (inclusive), `n ≥ 2` points.
pub fn log_grid(t_max: f64, t_min: f64, n: usize) -> Vec<f64> {
    let (a, b) = (t_max.ln(), t_min.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                t_min
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Distance to the identity in the bi-invariant metric of `Δ = -Σ w_f Δ_f`:
/// factor contributions `|θ|/sqrt(w)` (Circle, `θ` wrapped to `(-π, π]`) and
/// `angle/sqrt(w)` (SU2, rotation angle of the quaternion).
pub fn distance_from_identity(group: &GroupSpec, weights: &[f64], x: &GroupElement) -> f64 {
    group
        .factors()
        .iter()
        .zip(&x.parts)
        .zip(weights)
        .map(|((kind, part), w)| {
            let d = match (kind, part) {
                (FactorKind::Circle, Part::Circle(th)) => {
                    let t = th.rem_euclid(std::f64::consts::TAU);
                    t.min(std::f64::consts::TAU - t)
                }
                (FactorKind::SU2, Part::SU2(q)) => crate::group::su2::angle(q),
                _ => f64::NAN,
            };
            d * d / w
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trends() {
        let t = log_grid(1.0, 1e-3, 12);
        let dec: Vec<f64> = t.iter().map(|t| t * (1.0 / t).ln()).collect();
        assert_eq!(classify_trend(&t, &dec), Trend::Decreasing);
        let div: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        assert_eq!(classify_trend(&t, &div), Trend::Diverging);
        let flat: Vec<f64> = t.iter().map(|t| 2.0 + 0.01 * t).collect();
        assert_eq!(classify_trend(&t, &flat), Trend::Bounded);
        let zero = vec![0.0; t.len()];
        assert_eq!(classify_trend(&t, &zero), Trend::Bounded);
        let gauss: Vec<f64> = t.iter().map(|t| (-1.0 / t).exp() / t.powi(3)).collect();
        assert_eq!(classify_trend(&t, &gauss), Trend::Decreasing);
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(2.0, 0.01, 5);
        assert_eq!(g[0], 2.0);
        assert_eq!(g[4], 0.01);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn distances() {
        let g = GroupSpec::new(vec![FactorKind::Circle, FactorKind::SU2]).unwrap();
        let x = g.exp_vec(&[-1.0, 0.0, 0.6, 0.8]).unwrap();
        let d = distance_from_identity(&g, &[1.0, 4.0], &x);
        assert!((d - (1.0f64 + 0.25).sqrt()).abs() < 1e-12);
    }
}

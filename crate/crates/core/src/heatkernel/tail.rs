//! Majorants for omitted Peter-Weyl terms.
//!
//! For an operator with lower form constant `c` against the reference weights,
//! every omitted coefficient of `μ_t` (or of a derivative chain of total
//! Casimir degree `q`) is bounded in operator norm by `cas^q e^{-t c cas}`, and
//! the corresponding term of the expansion by `d_π²` times that. The bound
//! below sums those majorants over `cas > cutoff`: explicitly over a band
//! `(cutoff, F]`, and beyond `F` through
//!
//! `Σ_{cas>F} d² cas^q e^{-s cas} ≤ e^{-θsF} (q/(eδs))^q Π_f Z_f((1-θ-δ) s w_f)`
//!
//! with `Z_circle(u) ≤ 1 + sqrt(π/u)` and
//! `Z_su2(u) ≤ e^{u/4} (√π / (4 a^{3/2}) + 1/(e a))`, `a = u/4`.

use crate::error::{Error, Result};
use crate::group::{for_each_irrep, FactorKind, GroupSpec};
use crate::linalg::Kahan;

const THETA: f64 = 0.5;
const DELTA: f64 = 0.25;
const MAX_BAND: usize = 4_000_000;

fn ln_z(kind: FactorKind, u: f64) -> f64 {
    match kind {
        FactorKind::Circle => (1.0 + (std::f64::consts::PI / u).sqrt()).ln(),
        FactorKind::SU2 => {
            let a = u / 4.0;
            u / 4.0 + (std::f64::consts::PI.sqrt() / (4.0 * a.powf(1.5)) + 1.0 / (std::f64::consts::E * a)).ln()
        }
    }
}

/// `ln` of the analytic majorant of `Σ_{cas>f} d² cas^q e^{-s cas}`.
fn ln_remainder(group: &GroupSpec, weights: &[f64], s: f64, q: f64, f: f64) -> f64 {
    let delta = if q > 0.0 { DELTA } else { 0.0 };
    let rest = 1.0 - THETA - delta;
    let poly = if q > 0.0 {
        q * (q / (std::f64::consts::E * delta * s)).ln()
    } else {
        0.0
    };
    let z: f64 = group
        .factors()
        .iter()
        .zip(weights)
        .map(|(&k, &w)| ln_z(k, rest * s * w))
        .sum();
    -THETA * s * f + poly + z
}

/// `Σ_{cutoff < cas} d_π² cas^q e^{-s cas}` (upper bound) with `s = t·c`.
pub fn tail_sum(group: &GroupSpec, weights: &[f64], s: f64, cutoff: f64, q: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Argument(format!("tail decay rate {s} must be positive")));
    }
    if q < 0.0 {
        return Err(Error::Argument("derivative degree must be non-negative".into()));
    }
    let cutoff = cutoff.max(0.0);
    let mut explicit = Kahan::default();
    let mut lo = cutoff;
    // start the band where e^{-s cas} has dropped by e^{-8} past the cutoff
    let mut hi = cutoff + (8.0 / s).max(1.0);
    let mut visited = 0usize;
    for _ in 0..200 {
        let mut band = Kahan::default();
        for_each_irrep(group, weights, hi, |labels, _| {
            let cas: f64 = labels
                .iter()
                .zip(group.factors())
                .zip(weights)
                .map(|((&l, &k), w)| w * crate::group::factor_casimir(k, l))
                .sum();
            if cas > lo && cas <= hi {
                let d: f64 = labels
                    .iter()
                    .zip(group.factors())
                    .map(|(&l, &k)| crate::group::factor_dim(k, l) as f64)
                    .product();
                let poly = if q > 0.0 { cas.powf(q) } else { 1.0 };
                band.add(d * d * poly * (-s * cas).exp());
            }
            visited += 1;
        })?;
        explicit.add(band.value());
        let rem = ln_remainder(group, weights, s, q, hi).exp();
        let e = explicit.value();
        if rem <= 1e-3 * e || rem < 1e-300 || visited > MAX_BAND {
            return Ok(e + rem);
        }
        lo = hi;
        hi = cutoff + 2.0 * (hi - cutoff);
    }
    Ok(explicit.value() + ln_remainder(group, weights, s, q, hi).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_tail_matches_direct_sum() {
        let g = GroupSpec::circle();
        let b = tail_sum(&g, &[1.0], 1.0, 9.0, 0.0).unwrap();
        let direct: f64 = 2.0 * (4..30).map(|n: i32| (-(n * n) as f64).exp()).sum::<f64>();
        assert!(b >= direct && b <= 2.3e-7, "{b} vs {direct}");
    }

    #[test]
    fn su2_tail_dominates_direct_sum() {
        let g = GroupSpec::su2();
        for &(s, cut, q) in &[(0.05, 20.0, 0.0), (0.5, 6.0, 2.0), (0.01, 100.0, 1.5)] {
            let b = tail_sum(&g, &[1.0], s, cut, q).unwrap();
            let direct: f64 = (0..4000)
                .map(|tj| {
                    let c = crate::group::su2::casimir(tj);
                    if c > cut {
                        ((tj + 1) as f64).powi(2) * c.powf(q) * (-s * c).exp()
                    } else {
                        0.0
                    }
                })
                .sum();
            assert!(b >= direct && b <= 1.01 * direct, "s={s}: {b} vs {direct}");
        }
    }

    #[test]
    fn monotone_in_cutoff_and_rate() {
        let g = GroupSpec::new(vec![FactorKind::Circle, FactorKind::SU2]).unwrap();
        let w = [1.0, 2.0];
        let mut prev = f64::INFINITY;
        for k in 1..12 {
            let b = tail_sum(&g, &w, 0.3, 5.0 * k as f64, 1.0).unwrap();
            assert!(b < prev);
            prev = b;
        }
        let mut prev = f64::INFINITY;
        for k in 1..10 {
            let b = tail_sum(&g, &w, 0.1 * k as f64, 10.0, 0.0).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }
}

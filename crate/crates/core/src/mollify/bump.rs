//! The bump `ρ(t) = Z⁻¹ exp(-1/((t-1)(2-t)))` on `(1, 2)`, its rescalings and
//! smooth time cutoffs built from it.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::quadrature::gauss_legendre;

fn raw(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else {
        (-1.0 / ((t - 1.0) * (2.0 - t))).exp()
    }
}

fn nodes() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(20))
}

/// `∫_a^b raw` by composite Gauss–Legendre, doubling panels until two
/// successive values agree to `1e-15` relative.
fn integrate_raw(a: f64, b: f64) -> f64 {
    let (x, w) = nodes();
    let composite = |panels: usize| {
        let h = (b - a) / panels as f64;
        let mut acc = crate::linalg::Kahan::default();
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(w.iter()) {
                acc.add(0.5 * h * wi * raw(lo + 0.5 * h * (xi + 1.0)));
            }
        }
        acc.value()
    };
    let mut panels = 4;
    let mut prev = composite(panels);
    loop {
        panels *= 2;
        let cur = composite(panels);
        if (cur - prev).abs() <= 1e-15 * cur.abs().max(f64::MIN_POSITIVE) || panels > 1 << 14 {
            return cur;
        }
        prev = cur;
    }
}

fn normalizer() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| integrate_raw(1.0, 2.0))
}

const CDF_CELLS: usize = 2048;

/// Unnormalized `∫_1^{1 + i/CDF_CELLS} raw`.
fn cdf_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let h = 1.0 / CDF_CELLS as f64;
        let mut acc = crate::linalg::Kahan::default();
        let mut out = Vec::with_capacity(CDF_CELLS + 1);
        out.push(0.0);
        for i in 0..CDF_CELLS {
            acc.add(integrate_raw(1.0 + i as f64 * h, 1.0 + (i + 1) as f64 * h));
            out.push(acc.value());
        }
        out
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpProfile;

impl BumpProfile {
    pub fn normalizer(&self) -> f64 {
        normalizer()
    }

    pub fn eval(&self, t: f64) -> f64 {
        raw(t) / normalizer()
    }

    /// `∫_{-∞}^t ρ`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 1.0 {
            0.0
        } else if t >= 2.0 {
            1.0
        } else {
            // cubic Hermite on the tabulated integral, with `raw` as slope
            let table = cdf_table();
            let h = 1.0 / CDF_CELLS as f64;
            let i = (((t - 1.0) / h) as usize).min(CDF_CELLS - 1);
            let (a, b) = (1.0 + i as f64 * h, 1.0 + (i + 1) as f64 * h);
            let s = (t - a) / h;
            let (y0, y1) = (table[i], table[i + 1]);
            let (m0, m1) = (raw(a) * h, raw(b) * h);
            let v = (2.0 * s * s * s - 3.0 * s * s + 1.0) * y0
                + (s * s * s - 2.0 * s * s + s) * m0
                + (-2.0 * s * s * s + 3.0 * s * s) * y1
                + (s * s * s - s * s) * m1;
            v / normalizer()
        }
    }

    /// `ρ_τ(t) = ρ(t/τ)/τ`, supported in `(τ, 2τ)`.
    pub fn rho_tau(&self, tau: f64) -> Result<RhoTau> {
        if !(tau > 0.0) {
            return Err(Error::Argument(format!("τ must be positive, got {tau}")));
        }
        Ok(RhoTau { tau })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoTau {
    pub tau: f64,
}

impl RhoTau {
    pub fn eval(&self, t: f64) -> f64 {
        BumpProfile.eval(t / self.tau) / self.tau
    }

    pub fn support(&self) -> (f64, f64) {
        (self.tau, 2.0 * self.tau)
    }
}

/// Smooth time cutoff: 1 on `[inner.0, inner.1]`, 0 outside `(outer.0, outer.1)`,
/// with transitions given by the bump's distribution function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct TimeCutoff {
    pub inner: (f64, f64),
    pub outer: (f64, f64),
}

impl TimeCutoff {
    pub fn new(inner: (f64, f64), outer: (f64, f64)) -> Result<Self> {
        if !(outer.0 < inner.0 && inner.0 <= inner.1 && inner.1 < outer.1) {
            return Err(Error::Argument(format!(
                "cutoff needs outer.0 < inner.0 ≤ inner.1 < outer.1, got {inner:?} in {outer:?}"
            )));
        }
        Ok(TimeCutoff { inner, outer })
    }

    /// Identically one.
    pub fn one() -> Self {
        TimeCutoff {
            inner: (f64::NEG_INFINITY, f64::INFINITY),
            outer: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.inner.0 && t <= self.inner.1 {
            1.0
        } else if t <= self.outer.0 || t >= self.outer.1 {
            0.0
        } else if t < self.inner.0 {
            BumpProfile.cdf(1.0 + (t - self.outer.0) / (self.inner.0 - self.outer.0))
        } else {
            1.0 - BumpProfile.cdf(1.0 + (t - self.inner.1) / (self.outer.1 - self.inner.1))
        }
    }

    /// Closure of the support.
    pub fn support(&self) -> (f64, f64) {
        self.outer
    }
}

/// `η` and a hollow `Φ = η · (1 - χ)` where `χ` is a cutoff of an inner core;
/// `Φ` vanishes on the core and is 1 on the band between the core's outer
/// edge and `η`'s plateau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffPair {
    pub eta: TimeCutoff,
    pub core: TimeCutoff,
}

impl CutoffPair {
    pub fn new(eta: TimeCutoff, core: TimeCutoff) -> Result<Self> {
        if !(core.outer.0 >= eta.inner.0 && core.outer.1 <= eta.inner.1) {
            return Err(Error::Argument("the core must sit inside η's plateau".into()));
        }
        Ok(CutoffPair { eta, core })
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.eta.eval(t) * (1.0 - self.core.eval(t))
    }

    /// Checks ranges and support containments on `grid`.
    pub fn verify(&self, grid: &[f64]) -> bool {
        grid.iter().all(|&t| {
            let (e, p) = (self.eta.eval(t), self.phi(t));
            let in_range = (0.0..=1.0).contains(&e) && (0.0..=1.0).contains(&p);
            let outside = t > self.eta.outer.0 && t < self.eta.outer.1 || e == 0.0 && p == 0.0;
            let core = !(t >= self.core.inner.0 && t <= self.core.inner.1) || p == 0.0;
            in_range && outside && core
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_normalized_and_supported() {
        let b = BumpProfile;
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(2.0), 0.0);
        assert!(b.eval(1.5) > 0.0);
        assert!((b.cdf(1.5) - 0.5).abs() < 1e-12);
        for t in [1.01, 1.2, 1.377, 1.8, 1.999] {
            assert!((b.cdf(t) - integrate_raw(1.0, t) / b.normalizer()).abs() < 1e-12);
        }
        let n = 20000;
        let h = 1.0 / n as f64;
        let s: f64 = (0..n).map(|i| b.eval(1.0 + (i as f64 + 0.5) * h) * h).sum();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rho_tau_scaling() {
        let r = BumpProfile.rho_tau(0.1).unwrap();
        assert_eq!(r.support(), (0.1, 0.2));
        assert!((r.eval(0.15) * 0.1 - BumpProfile.eval(1.5)).abs() < 1e-14);
        assert!(BumpProfile.rho_tau(0.0).is_err());
        let n = 20000;
        let h = 0.1 / n as f64;
        let s: f64 = (0..n).map(|i| r.eval(0.1 + (i as f64 + 0.5) * h) * h).sum();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cutoffs() {
        let eta = TimeCutoff::new((0.3, 0.7), (0.1, 0.9)).unwrap();
        assert_eq!(eta.eval(0.5), 1.0);
        assert_eq!(eta.eval(0.05), 0.0);
        assert!((eta.eval(0.2) - 0.5).abs() < 1e-12);
        let core = TimeCutoff::new((0.45, 0.55), (0.4, 0.6)).unwrap();
        let pair = CutoffPair::new(eta, core).unwrap();
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        assert!(pair.verify(&grid));
        assert_eq!(pair.phi(0.5), 0.0);
        assert_eq!(pair.phi(0.65), 1.0);
    }
}

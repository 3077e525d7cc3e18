//! Haar quadrature on products of circles and SU(2).
//!
//! A circle factor at resolution `R` uses `R` equispaced angles and integrates
//! `e^{inθ}` exactly for `|n| < R`. An SU(2) factor at resolution `R` uses the
//! ZYZ Euler grid `q = exp_z(α) exp_y(β) exp_z(γ)` with `2R-1` values of
//! `α ∈ [0, 2π)`, `R` Gauss-Legendre nodes in `cos β` and `2R` values of
//! `γ ∈ [0, 4π)`; it integrates every matrix coefficient of spin `j` with
//! `2j ≤ 2R-1` exactly. Products `π_{mn} conj(π'_{m'n'})` are integrated exactly
//! when both labels satisfy `2|n| ≤ R-1` (circle) or `2j ≤ R-1` (SU(2)).

use nalgebra::{Quaternion, UnitQuaternion};

use super::{FactorKind, GroupElement, GroupSpec, IrrepIndex, Part};
use crate::error::{Error, Result};
use crate::linalg::Kahan;

const MAX_NODES: usize = 20_000_000;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<GroupElement>,
    pub weights: Vec<f64>,
    /// Resolution used for each factor.
    pub resolution: Vec<usize>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (weights sum to 2).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn circle_rule(r: usize) -> Vec<(Part, f64)> {
    (0..r)
        .map(|k| {
            (
                Part::Circle(std::f64::consts::TAU * k as f64 / r as f64),
                1.0 / r as f64,
            )
        })
        .collect()
}

fn zq(angle: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::new_unchecked(Quaternion::new((0.5 * angle).cos(), 0.0, 0.0, (0.5 * angle).sin()))
}

fn yq(angle: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::new_unchecked(Quaternion::new((0.5 * angle).cos(), 0.0, (0.5 * angle).sin(), 0.0))
}

fn su2_rule(r: usize) -> Vec<(Part, f64)> {
    let na = 2 * r - 1;
    let ng = 2 * r;
    let (xb, wb) = gauss_legendre(r);
    let mut out = Vec::with_capacity(na * r * ng);
    for ia in 0..na {
        let alpha = std::f64::consts::TAU * ia as f64 / na as f64;
        for (x, w) in xb.iter().zip(&wb) {
            let beta = x.clamp(-1.0, 1.0).acos();
            let ab = zq(alpha) * yq(beta);
            for ig in 0..ng {
                let gamma = 2.0 * std::f64::consts::TAU * ig as f64 / ng as f64;
                let mut q = ab * zq(gamma);
                q.renormalize();
                out.push((Part::SU2(q), 0.5 * w / (na * ng) as f64));
            }
        }
    }
    out
}

/// Tensor-product rule with one resolution for every factor.
pub fn haar_quadrature(spec: &GroupSpec, resolution: usize) -> Result<QuadratureRule> {
    haar_quadrature_with(spec, &vec![resolution; spec.num_factors()])
}

/// Tensor-product rule with per-factor resolutions.
pub fn haar_quadrature_with(spec: &GroupSpec, resolution: &[usize]) -> Result<QuadratureRule> {
    if resolution.len() != spec.num_factors() {
        return Err(Error::Structural("one resolution per factor required".into()));
    }
    if resolution.contains(&0) {
        return Err(Error::Argument("quadrature resolution must be at least 1".into()));
    }
    let per: Vec<Vec<(Part, f64)>> = spec
        .factors()
        .iter()
        .zip(resolution)
        .map(|(f, &r)| match f {
            FactorKind::Circle => circle_rule(r),
            FactorKind::SU2 => su2_rule(r),
        })
        .collect();
    let total = per.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
    match total {
        Some(n) if n <= MAX_NODES => {}
        _ => return Err(Error::Cost("quadrature grid exceeds 2e7 nodes".into())),
    }
    let mut nodes = vec![(Vec::<Part>::new(), 1.0)];
    for factor in &per {
        let mut next = Vec::with_capacity(nodes.len() * factor.len());
        for (parts, w) in &nodes {
            for (p, wf) in factor {
                let mut np = parts.clone();
                np.push(p.clone());
                next.push((np, w * wf));
            }
        }
        nodes = next;
    }
    let (nodes, weights) = nodes
        .into_iter()
        .map(|(parts, w)| (GroupElement { parts }, w))
        .unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        resolution: resolution.to_vec(),
    })
}

/// Smallest per-factor resolution integrating all pairwise coefficient products of `irreps`.
pub fn pair_resolution(spec: &GroupSpec, irreps: &[IrrepIndex]) -> Vec<usize> {
    (0..spec.num_factors())
        .map(|k| {
            let m = irreps.iter().map(|p| p.labels[k].unsigned_abs() as usize).max().unwrap_or(0);
            match spec.factors()[k] {
                FactorKind::Circle => 2 * m + 1,
                FactorKind::SU2 => m + 1,
            }
        })
        .collect()
}

/// Rule integrating all pairwise products of coefficients of `irreps`.
pub fn quadrature_for_pairs(spec: &GroupSpec, irreps: &[IrrepIndex]) -> Result<QuadratureRule> {
    haar_quadrature_with(spec, &pair_resolution(spec, irreps))
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fails with a resolution error unless every pairwise coefficient product is exact.
    pub fn check_pairs(&self, spec: &GroupSpec, irreps: &[IrrepIndex]) -> Result<()> {
        for p in irreps {
            for (k, (&l, f)) in p.labels.iter().zip(spec.factors()).enumerate() {
                let r = self.resolution[k];
                let ok = match f {
                    FactorKind::Circle => 2 * (l.unsigned_abs() as usize) < r,
                    FactorKind::SU2 => (l as usize) < r,
                };
                if !ok {
                    return Err(Error::Resolution { resolution: r, label: l });
                }
            }
        }
        Ok(())
    }

    /// Fails unless every single matrix coefficient of `irreps` is integrated exactly.
    pub fn check_single(&self, spec: &GroupSpec, irreps: &[IrrepIndex]) -> Result<()> {
        for p in irreps {
            for (k, (&l, f)) in p.labels.iter().zip(spec.factors()).enumerate() {
                let r = self.resolution[k];
                let ok = match f {
                    FactorKind::Circle => (l.unsigned_abs() as usize) < r,
                    FactorKind::SU2 => (l as usize) < 2 * r,
                };
                if !ok {
                    return Err(Error::Resolution { resolution: r, label: l });
                }
            }
        }
        Ok(())
    }

    /// Compensated `Σ w_k f(x_k)` over precomputed values.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        let mut k = Kahan::default();
        for (w, v) in self.weights.iter().zip(values) {
            k.add(w * v);
        }
        k.value()
    }

    pub fn integrate<F: Fn(&GroupElement) -> f64 + Sync + Send>(&self, f: F) -> f64 {
        let vals = crate::exec::map(&self.nodes, f);
        self.integrate_values(&vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::irrep_enumerate;
    use crate::linalg::C64;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        for deg in 0..10 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "deg {deg}");
        }
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn weights_sum_to_one() {
        let spec = GroupSpec::new(vec![FactorKind::Circle, FactorKind::SU2]).unwrap();
        let q = haar_quadrature(&spec, 4).unwrap();
        let s: f64 = q.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(q.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn su2_single_coefficients_vanish() {
        let spec = GroupSpec::su2();
        let q = haar_quadrature(&spec, 3).unwrap();
        for tj in 1..=5 {
            let pi = IrrepIndex::new(vec![tj]);
            q.check_single(&spec, std::slice::from_ref(&pi)).unwrap();
            let d = (tj + 1) as usize;
            let mut acc = crate::linalg::CMat::zeros(d, d);
            for (x, w) in q.nodes.iter().zip(&q.weights) {
                acc += spec.rep_matrix(&pi, x).unwrap() * C64::new(*w, 0.0);
            }
            assert!(crate::linalg::max_abs(&acc) < 1e-13, "2j = {tj}");
        }
        assert!(q.check_single(&spec, &[IrrepIndex::new(vec![6])]).is_err());
    }

    #[test]
    fn pair_resolution_passes_its_own_check() {
        let spec = GroupSpec::new(vec![FactorKind::Circle, FactorKind::SU2]).unwrap();
        let irreps = irrep_enumerate(&spec, &[1.0, 1.0], 6.0).unwrap();
        let q = quadrature_for_pairs(&spec, &irreps).unwrap();
        q.check_pairs(&spec, &irreps).unwrap();
        let small = haar_quadrature(&spec, 2).unwrap();
        assert!(matches!(
            small.check_pairs(&spec, &irreps),
            Err(Error::Resolution { .. })
        ));
    }
}

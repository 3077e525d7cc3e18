//! `μ_t^Δ = μ_t^{(1-ε)Δ} * μ_t^{εΔ-αL} * μ_t^{αL}` and
//! `μ_t^L = μ_t^{βΔ} * μ_t^{L/2-βΔ} * μ_t^{L/2}`, blockwise and in space.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{irrep_enumerate, quadrature_for_pairs, GroupElement, IrrepIndex};
use crate::heatkernel::{required_cutoff, SpectralKernel};
use crate::operators::{ComparabilityMethod, SubLaplacianSpec};
use crate::spectral::Coeff;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub k: u32,
    pub t: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    /// Comparability constant of `εΔ - αL`.
    pub middle_c: f64,
    pub irreps: usize,
    /// Largest Frobenius residual over irreps, first identity.
    pub residual: f64,
    /// Same for the identity for `μ^L`.
    pub residual_l: f64,
    /// Largest `|quadrature convolution - μ_t^Δ|` over the sample points.
    pub spatial_residual: f64,
    /// Truncation certificate of the spatial comparison.
    pub spatial_certificate: f64,
    pub pass: bool,
}

/// Residual tolerance of the blockwise identities.
pub const BLOCK_TOL: f64 = 1e-10;
/// Tolerance of the spatial cross-check.
pub const SPATIAL_TOL: f64 = 1e-6;

/// `ε = 1/(2k+1)`, `α = εC^{-1}/2` unless given (and then `α < εC^{-1}`),
/// `β = c/4`. `points` may be empty to skip the spatial check.
pub fn decomposition_check(
    spec: &SubLaplacianSpec,
    k: u32,
    t: f64,
    alpha: Option<f64>,
    points: &[GroupElement],
) -> Result<DecompositionReport> {
    if !(t > 0.0) {
        return Err(Error::Argument("t must be positive".into()));
    }
    let cert = spec.comparability(ComparabilityMethod::Eigen)?;
    let eps = 1.0 / (2 * k + 1) as f64;
    let limit = eps / cert.big_c;
    let alpha = alpha.unwrap_or(0.5 * limit);
    if !(alpha > 0.0 && alpha < limit) {
        return Err(Error::Argument(format!(
            "α = {alpha} violates 0 < α < εC⁻¹ = {limit} (ε = {eps}, C = {})",
            cert.big_c
        )));
    }
    let beta = 0.25 * cert.c;
    let delta = spec.reference_operator(1.0);
    let middle = delta.combine(eps, spec, -alpha)?;
    let middle_c = middle.comparability(ComparabilityMethod::Eigen)?.c;
    let half = spec.scaled(0.5)?;
    let half_minus = half.combine(1.0, &delta, -beta)?;

    // Enumeration sized for the smoothest factor of the spatial check.
    let cutoff = required_cutoff(&delta, (1.0 - eps) * t, 1e-9, 0.0, 1.0, 1e5)?;
    let irreps: Arc<Vec<IrrepIndex>> =
        Arc::new(irrep_enumerate(spec.group(), spec.reference().weights(), cutoff)?);
    let build = |s: &SubLaplacianSpec| SpectralKernel::build_on(s, Arc::clone(&irreps), cutoff);
    let k_delta = build(&delta)?;
    let k_outer = build(&delta.scaled(1.0 - eps)?)?;
    let k_middle = build(&middle)?;
    let k_alpha = build(&spec.scaled(alpha)?)?;
    let k_l = build(spec)?;
    let k_beta = build(&delta.scaled(beta)?)?;
    let k_half_minus = build(&half_minus)?;
    let k_half = build(&half)?;

    let heat = |k: &SpectralKernel| k.calculus(|l| (-t * l).exp());
    let dims: Vec<usize> = irreps.iter().map(|p| spec.group().irrep_dim(p)).collect();
    // μ1 * μ2 * μ3 has coefficients ĝ3 ĝ2 ĝ1
    let residual_of = |target: &[Coeff], first: &[Coeff], second: &[Coeff], third: &[Coeff]| {
        (0..dims.len())
            .map(|i| {
                let prod = third[i].mul(&second[i]).mul(&first[i]);
                prod.add(&target[i].scale((-1.0).into()), dims[i]).frobenius(dims[i])
            })
            .fold(0.0, f64::max)
    };
    let residual = residual_of(&heat(&k_delta), &heat(&k_outer), &heat(&k_middle), &heat(&k_alpha));
    let residual_l = residual_of(&heat(&k_l), &heat(&k_beta), &heat(&k_half_minus), &heat(&k_half));

    let (spatial_residual, spatial_certificate) = if points.is_empty() {
        (0.0, 0.0)
    } else {
        let outer = k_outer.at(t)?;
        let rest = crate::heatkernel::convolve_spectral(&k_middle, t, &k_alpha, t)?;
        let target = k_delta.at(t)?;
        let rule = quadrature_for_pairs(spec.group(), &irreps)?;
        let rest_values = rest.eval_real_many(&rule.nodes);
        let group = spec.group();
        let diffs: Vec<Result<f64>> = crate::exec::map(points, |x| {
            let mut acc = crate::linalg::Kahan::default();
            for ((y, w), g) in rule.nodes.iter().zip(&rule.weights).zip(&rest_values) {
                let xy = group.multiply(x, &group.inverse(y)?)?;
                acc.add(w * outer.eval_with(&outer.rep_table(&xy)).re * g);
            }
            Ok((acc.value() - target.eval(x)?.value.re).abs())
        });
        let worst = diffs.into_iter().collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
        // omitted blocks of the convolution are bounded by the smooth factor's tail
        let cert = k_outer.tail_bound(t, 0.0)? + k_delta.tail_bound(t, 0.0)?;
        (worst, cert)
    };
    let pass = residual <= BLOCK_TOL && residual_l <= BLOCK_TOL && spatial_residual <= SPATIAL_TOL;
    Ok(DecompositionReport {
        k,
        t,
        epsilon: eps,
        alpha,
        beta,
        c: cert.c,
        big_c: cert.big_c,
        middle_c,
        irreps: irreps.len(),
        residual,
        residual_l,
        spatial_residual,
        spatial_certificate,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::operators::BiInvariantLaplacian;

    #[test]
    fn epsilon_and_alpha_defaults() {
        let g = GroupSpec::circle();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let r = decomposition_check(&d, 1, 0.5, None, &[]).unwrap();
        assert_eq!(r.epsilon, 1.0 / 3.0);
        assert!((r.alpha - 1.0 / 6.0).abs() < 1e-15);
        assert!(r.residual <= 1e-13 && r.residual_l <= 1e-13);
        let err = decomposition_check(&d, 1, 0.5, Some(0.4), &[]).unwrap_err();
        assert!(err.to_string().contains("εC⁻¹"));
    }
}

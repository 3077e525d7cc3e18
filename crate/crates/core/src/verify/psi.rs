//! Fit of `μ_t^L(x) ≤ exp{M_L(t) - c_L (ψ(x) - ψ(e))² / t}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::heatkernel::SpectralKernel;
use crate::linalg::C64;
use crate::seminorms::{dk_pointwise, p_op, Frame, LambdaComposition};
use crate::spectral::SpectralFunction;

/// Squared differences below this are excluded from the fit.
pub const DENOMINATOR_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiFit {
    /// Factor applied to `ψ` to make it admissible.
    pub scale: f64,
    pub c_l: f64,
    pub witness_t: f64,
    pub witness_point: usize,
    pub used: usize,
    pub excluded: usize,
    pub pass: bool,
}

/// `inf_{t, x ∈ K} t (M_L(t) - log μ_t(x)) / (ψ(x) - ψ(e))²`, after scaling `ψ`
/// so that `|D¹ψ|_L ≤ 1` and `|Lψ| ≤ 1` on `check_points`.
pub fn psi_bound_fit(
    kernel: &SpectralKernel,
    psi: &SpectralFunction,
    k_points: &[GroupElement],
    t_grid: &[f64],
    check_points: &[GroupElement],
) -> Result<PsiFit> {
    let spec = kernel.spec();
    let frame = Frame::of_operator(spec);
    let grad = dk_pointwise(spec, &frame, psi, 1, check_points)?;
    let lpsi = p_op(&[], &LambdaComposition { entries: vec![1] }, spec, &frame, psi)?;
    let lvals = lpsi.eval_real_many(check_points);
    let s = grad
        .iter()
        .chain(lvals.iter())
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if !s.is_finite() {
        return Err(Error::Argument("ψ is not admissible after rescaling".into()));
    }
    let scale = if s > 1.0 { 1.0 / s } else { 1.0 };
    let psi = SpectralFunction::new(
        psi.group.clone(),
        psi.irreps.clone(),
        psi.coeffs.iter().map(|c| c.scale(C64::new(scale, 0.0))).collect(),
        psi.truncation * scale,
    )?;
    let pe = psi.eval(&spec.group().identity())?.value.re;
    let denoms: Vec<f64> = psi
        .eval_real_many(k_points)
        .into_iter()
        .map(|v| (v - pe) * (v - pe))
        .collect();
    let used_points: Vec<usize> = (0..k_points.len()).filter(|&i| denoms[i] >= DENOMINATOR_FLOOR).collect();
    if used_points.is_empty() {
        return Err(Error::Argument(
            "ψ(x) - ψ(e) vanishes on the whole region; the fit is degenerate".into(),
        ));
    }
    let mut best = (f64::INFINITY, t_grid.first().copied().unwrap_or(f64::NAN), 0usize);
    for &t in t_grid {
        let m = kernel.on_diag_log(t)?;
        let dens = kernel.densities(t, k_points)?;
        for &i in &used_points {
            let lm = dens[i].value.max(f64::MIN_POSITIVE).ln();
            let r = t * (m - lm) / denoms[i];
            if r < best.0 {
                best = (r, t, i);
            }
        }
    }
    Ok(PsiFit {
        scale,
        c_l: best.0,
        witness_t: best.1,
        witness_point: best.2,
        used: used_points.len() * t_grid.len(),
        excluded: (k_points.len() - used_points.len()) * t_grid.len(),
        pass: best.0 > 0.0 && best.0.is_finite(),
    })
}

//! `e^{A·M_L(αt)} · t^{-σ} · M^N_{Δ,L}(K, μ_t^L)` along `t ↓ 0`.

use serde::{Deserialize, Serialize};

use super::{distance_from_identity, ScanResult, Trend};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::heatkernel::{required_cutoff, SpectralKernel};
use crate::seminorms::{ChainNorm, Frame, Region};
use crate::operators::SubLaplacianSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonalParams {
    pub n: u32,
    pub sigma: f64,
    pub a: f64,
    pub alpha: f64,
    /// Decreasing times.
    pub t_grid: Vec<f64>,
    /// Smallest admissible distance from `K` to the identity.
    #[serde(default = "default_min_distance")]
    pub min_distance: f64,
    /// Tail tolerance at the smallest time, before the `e^{AM}t^{-σ}` factor.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_min_distance() -> f64 {
    0.25
}

fn default_tail_tol() -> f64 {
    1e-13
}

impl OffDiagonalParams {
    pub fn new(n: u32, sigma: f64, a: f64, alpha: f64, t_grid: Vec<f64>) -> Self {
        OffDiagonalParams {
            n,
            sigma,
            a,
            alpha,
            t_grid,
            min_distance: default_min_distance(),
            tail_tol: default_tail_tol(),
        }
    }
}

/// Scan over `params.t_grid`; columns `t`, value, certificate. Passes when
/// the trend is decreasing or bounded and all certificates are small.
pub fn off_diagonal_scan(
    spec: &SubLaplacianSpec,
    k_points: &[GroupElement],
    params: &OffDiagonalParams,
    max_cutoff: f64,
) -> Result<ScanResult> {
    if k_points.is_empty() || params.t_grid.is_empty() {
        return Err(Error::Argument("off-diagonal scan needs points and times".into()));
    }
    if !(params.alpha > 0.0) || params.t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Argument("α and all times must be positive".into()));
    }
    let weights = spec.reference().weights();
    let dmin = k_points
        .iter()
        .map(|x| distance_from_identity(spec.group(), weights, x))
        .fold(f64::INFINITY, f64::min);
    if !(dmin >= params.min_distance) {
        return Err(Error::Argument(format!(
            "K reaches distance {dmin:.3e} from the identity, below the required {}",
            params.min_distance
        )));
    }
    let t_min = params.t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let frame = Frame::delta(spec);
    let q = 0.5 * params.n as f64;
    // the first norm is only used to size the truncation
    let probe = ChainNorm::mixed(
        spec,
        &frame,
        std::sync::Arc::new(vec![spec.group().trivial_irrep()]),
        params.n,
        0,
    )?;
    let (gain, _) = probe.budget();
    let cutoff_for = |t: f64, cap: f64| required_cutoff(spec, t, params.tail_tol, q, gain.max(1.0), cap);
    let cutoff = cutoff_for(t_min.min(params.alpha * t_min), max_cutoff)?;
    let kernel = SpectralKernel::build(spec, cutoff)?;
    let norm = ChainNorm::mixed(spec, &frame, std::sync::Arc::clone(kernel.irreps()), params.n, 0)?;
    let mut values = Vec::with_capacity(params.t_grid.len());
    let mut certs = Vec::with_capacity(params.t_grid.len());
    for &t in &params.t_grid {
        let local = kernel.restricted(cutoff_for(t, f64::INFINITY)?);
        let rep = norm.profile(&local, &Region::new(vec![t], k_points.to_vec())?)?.remove(0);
        let on = kernel.on_diag(params.alpha * t)?;
        let m = on.value.max(f64::MIN_POSITIVE).ln();
        let dm = if on.value > on.abs_error {
            on.abs_error / (on.value - on.abs_error)
        } else {
            f64::INFINITY
        };
        let factor = (params.a * m).exp() * t.powf(-params.sigma);
        let v = factor * rep.value;
        values.push(v);
        certs.push(factor * rep.truncation_certificate + v * ((params.a * dm).exp() - 1.0));
    }
    let mut r = ScanResult::new(
        vec!["t".into()],
        params.t_grid.iter().map(|&t| vec![t]).collect(),
        values,
        certs,
    );
    r.pass = r.pass && matches!(r.trend, Trend::Decreasing | Trend::Bounded);
    Ok(r)
}

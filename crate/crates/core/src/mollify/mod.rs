//! Space-time mollification: `W ⋆ (ρ_τ μ^L)`, the two-parameter family
//! `Ũ_{α,τ} = (ρ_α μ^Δ) ⋆ (ηU) ⋆ (ρ_τ μ^L)` and boundedness diagnostics.
//!
//! Rough data are concrete representatives: steps in time, and spatial data
//! given by many Fourier modes. Space is always represented spectrally, so
//! group convolutions are exact blockwise products; time integrals use the
//! trapezoid rule on a lattice `k·dt`.

mod bump;
mod spacetime;

pub use bump::{BumpProfile, CutoffPair, RhoTau, TimeCutoff};
pub use spacetime::{spacetime_convolve, Smoothness, SpaceTimeFunction};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::heatkernel::SpectralKernel;
use crate::operators::SubLaplacianSpec;
use crate::seminorms::{ChainNorm, Frame, Region, SeminormReport};
use crate::spectral::Coeff;
use crate::verify::{ScanResult, Trend};

/// Smallest ratio between consecutive τ of a derivative scan.
pub const TAU_RATIO: f64 = 1.25;
/// Smallest number of lattice steps per τ; the trapezoid defect of `ρ_τ`
/// is below `1e-8` from here on.
pub const STEPS_PER_TAU: f64 = 32.0;

/// `c₀ = min(1, dist(support, ∂I)/4)`.
pub fn c0(interval: (f64, f64), support: (f64, f64)) -> f64 {
    let d = (support.0 - interval.0).min(interval.1 - support.1);
    (d / 4.0).min(1.0)
}

/// `e^{-sΛ}` on the first `n` irreps of `kernel`.
fn heat_blocks(kernel: &SpectralKernel, n: usize, s: f64) -> Vec<Coeff> {
    kernel.blocks()[..n].iter().map(|b| b.apply(|l| (-s * l).exp())).collect()
}

fn check_kernel(f: &SpaceTimeFunction, kernel: &SpectralKernel) -> Result<usize> {
    let n = f.irreps.len();
    if kernel.spec().group() != &f.group || kernel.irreps().len() < n || kernel.irreps()[..n] != f.irreps[..] {
        return Err(Error::Structural(
            "the function's irreps must be a prefix of the kernel's enumeration".into(),
        ));
    }
    Ok(n)
}

/// `ρ_τ(t) μ_{t - shift}` sampled on the lattice of `like`, compactly supported.
pub fn kernel_profile(
    kernel: &SpectralKernel,
    like: &SpaceTimeFunction,
    tau: f64,
    shift: f64,
) -> Result<SpaceTimeFunction> {
    let n = check_kernel(like, kernel)?;
    let rho = BumpProfile.rho_tau(tau)?;
    let dt = like.dt;
    if tau < STEPS_PER_TAU * dt * (1.0 - 1e-9) {
        return Err(Error::Argument(format!(
            "τ = {tau} spans fewer than {STEPS_PER_TAU} steps of dt = {dt}"
        )));
    }
    let k_lo = (tau / dt).floor() as i64;
    let k_hi = (2.0 * tau / dt).ceil() as i64;
    SpaceTimeFunction::from_fn(
        &like.group,
        std::sync::Arc::clone(&like.irreps),
        dt,
        k_lo,
        (k_hi - k_lo + 1) as usize,
        true,
        Smoothness::BandLimited,
        |t| {
            let r = rho.eval(t);
            Ok(if r == 0.0 {
                vec![Coeff::zero(); n]
            } else {
                heat_blocks(kernel, n, t - shift)
                    .into_iter()
                    .map(|c| c.scale(crate::linalg::C64::new(r, 0.0)))
                    .collect()
            })
        },
    )
}

/// `W_τ = W ⋆ (ρ_τ μ^L)`, computed as `(W ⋆ ρ_τ μ_{· - τ/2}) * μ_{τ/2}`.
/// `inner` is the time range of interest; `τ` must lie in `(0, c₀]`.
pub fn smooth_by_kernel(
    w: &SpaceTimeFunction,
    tau: f64,
    kernel: &SpectralKernel,
    inner: (f64, f64),
) -> Result<SpaceTimeFunction> {
    let c = c0(w.interval(), inner);
    if !(tau > 0.0 && tau <= c * (1.0 + 1e-9)) {
        return Err(Error::Argument(format!("τ = {tau} outside (0, c₀] with c₀ = {c}")));
    }
    let n = check_kernel(w, kernel)?;
    let stage = spacetime_convolve(w, &kernel_profile(kernel, w, tau, 0.5 * tau)?)?;
    let mut out = stage.then_blocks(&heat_blocks(kernel, n, 0.5 * tau))?;
    out.smoothness = Smoothness::BandLimited;
    Ok(out)
}

/// `Ũ_{α,τ}`; `α = 0` or `τ = 0` drops the corresponding factor.
pub fn two_param_family(
    u: &SpaceTimeFunction,
    eta: &TimeCutoff,
    alpha: f64,
    tau: f64,
    delta: &SpectralKernel,
    l: &SpectralKernel,
) -> Result<SpaceTimeFunction> {
    if alpha == 0.0 && tau == 0.0 {
        return Err(Error::Argument("(α, τ) = (0, 0) is excluded".into()));
    }
    let c = c0(u.interval(), eta.support()).max(0.0);
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=c * (1.0 + 1e-9)).contains(&tau) {
        return Err(Error::Argument(format!(
            "(α, τ) = ({alpha}, {tau}) outside [0, 1] × [0, c₀] with c₀ = {c}"
        )));
    }
    let mut cur = u.times_profile(|t| eta.eval(t));
    cur.compact = true;
    if alpha > 0.0 {
        cur = spacetime_convolve(&kernel_profile(delta, &cur, alpha, 0.0)?, &cur)?;
    }
    if tau > 0.0 {
        cur = spacetime_convolve(&cur, &kernel_profile(l, &cur, tau, 0.0)?)?;
    }
    Ok(cur)
}

/// Largest `|f - g|` over lattice times in `times` (thinned as in
/// [`lattice_times`]) and `points`.
pub fn sup_distance(
    f: &SpaceTimeFunction,
    g: &SpaceTimeFunction,
    times: (f64, f64),
    max_times: usize,
    points: &[GroupElement],
) -> Result<f64> {
    let d = f.combine(1.0, g, -1.0)?;
    let idx: Vec<usize> = lattice_times(&d, times, max_times)
        .into_iter()
        .filter_map(|t| d.index_of(t))
        .collect();
    if idx.is_empty() {
        return Err(Error::Argument("no lattice time inside the comparison window".into()));
    }
    let vals = crate::exec::map(&idx, |&i| points.iter().map(|x| d.eval(i, x).abs()).fold(0.0, f64::max));
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Lattice times of `f` inside `window`, thinned to at most `max` evenly
/// strided entries (`0` keeps all).
pub fn lattice_times(f: &SpaceTimeFunction, window: (f64, f64), max: usize) -> Vec<f64> {
    let all: Vec<f64> = (0..f.len())
        .map(|i| f.time(i))
        .filter(|t| *t >= window.0 - 1e-12 && *t <= window.1 + 1e-12)
        .collect();
    if max == 0 || all.len() <= max {
        return all;
    }
    let stride = all.len().div_ceil(max);
    all.into_iter().step_by(stride).collect()
}

/// `M^{N,p}_Δ` of `f` over `region`; times are snapped to the lattice.
pub fn mixed_norm_on(
    delta: &SubLaplacianSpec,
    f: &SpaceTimeFunction,
    n: u32,
    p: u32,
    region: &Region,
) -> Result<SeminormReport> {
    let times: Vec<f64> = region.times.iter().map(|t| (t / f.dt).round() * f.dt).collect();
    let norm = ChainNorm::mixed(delta, &Frame::delta(delta), std::sync::Arc::clone(&f.irreps), n, p)?;
    let profile = norm.profile(f, &Region::new(times, region.points.clone())?)?;
    Ok(profile
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("non-empty region"))
}

/// `|dt Σ_k ρ_τ(k dt) - 1|`, the trapezoid defect of `ρ_τ` on the lattice.
pub fn lattice_defect(tau: f64, dt: f64) -> Result<f64> {
    let rho = BumpProfile.rho_tau(tau)?;
    let lo = (tau / dt).floor() as i64;
    let hi = (2.0 * tau / dt).ceil() as i64;
    let s: f64 = crate::linalg::ksum((lo..=hi).map(|k| rho.eval(k as f64 * dt)));
    Ok((s * dt - 1.0).abs())
}

/// Checks a decreasing τ grid against the lattice and the ratio rule.
pub fn check_tau_grid(tau_grid: &[f64], dt: f64) -> Result<()> {
    let suggest = || {
        let hi = tau_grid.first().copied().unwrap_or(0.1);
        let lo = STEPS_PER_TAU * dt;
        let mut g = vec![hi];
        while g.last().unwrap() / TAU_RATIO >= lo {
            g.push(g.last().unwrap() / TAU_RATIO);
        }
        g
    };
    let bad_ratio = tau_grid.windows(2).any(|w| w[0] / w[1] < TAU_RATIO * (1.0 - 1e-9));
    let too_fine = tau_grid.iter().any(|&t| t < STEPS_PER_TAU * dt * (1.0 - 1e-9));
    if tau_grid.len() < 3 || bad_ratio || too_fine {
        return Err(Error::Argument(format!(
            "τ grid must have ≥ 3 decreasing values with ratio ≥ {TAU_RATIO} and τ ≥ {STEPS_PER_TAU}·dt; try {:?}",
            suggest()
        )));
    }
    Ok(())
}

/// Decreasing τ grid from `tau_max` with ratio `TAU_RATIO`, down to the
/// lattice threshold.
pub fn tau_grid(tau_max: f64, dt: f64) -> Vec<f64> {
    let mut g = vec![tau_max];
    while g.last().unwrap() / TAU_RATIO >= STEPS_PER_TAU * dt {
        g.push(g.last().unwrap() / TAU_RATIO);
    }
    g
}

/// `M^{N,p}_Δ(region, ∂_τ Ũ_{0,τ})` with central differences over a
/// decreasing τ grid (ratio ≥ 1.25).
///
/// Certificates: the trapezoid defects of the two neighbouring `ρ_τ` plus a
/// worst-case roundoff term, divided by the τ step and scaled by
/// `M^{N,p}_Δ(region, ηU)`. A scan whose values all
/// sit below their certificates is at the discretization floor and counts as
/// bounded. Passes when the scan does not diverge.
#[allow(clippy::too_many_arguments)]
pub fn bounded_tau_derivative_scan(
    u: &SpaceTimeFunction,
    eta: &TimeCutoff,
    delta_spec: &SubLaplacianSpec,
    delta: &SpectralKernel,
    l: &SpectralKernel,
    n: u32,
    p: u32,
    region: &Region,
    tau_grid: &[f64],
) -> Result<ScanResult> {
    check_tau_grid(tau_grid, u.dt)?;
    let family: Vec<SpaceTimeFunction> = tau_grid
        .iter()
        .map(|&tau| two_param_family(u, eta, 0.0, tau, delta, l))
        .collect::<Result<_>>()?;
    let scale = mixed_norm_on(delta_spec, &u.times_profile(|t| eta.eval(t)), n, p, region)?.value;
    let mut values = Vec::new();
    let mut certs = Vec::new();
    let mut grid = Vec::new();
    for k in 1..tau_grid.len() - 1 {
        let h = tau_grid[k - 1] - tau_grid[k + 1];
        let d = family[k - 1].combine(1.0 / h, &family[k + 1], -1.0 / h)?;
        values.push(mixed_norm_on(delta_spec, &d, n, p, region)?.value);
        let defect = lattice_defect(tau_grid[k - 1], u.dt)? + lattice_defect(tau_grid[k + 1], u.dt)?;
        // worst-case roundoff of the longer member's time sums, amplified by
        // each central time difference
        let terms = 2.0 * tau_grid[k - 1] / u.dt + 1.0;
        let roundoff = 2.0 * terms * f64::EPSILON * (2.0 / u.dt).powi(p as i32);
        certs.push(scale * (defect + roundoff) / h);
        grid.push(vec![tau_grid[k]]);
    }
    let floor = values.iter().zip(&certs).all(|(v, c)| v <= c);
    let mut r = ScanResult::new(vec!["tau".into()], grid, values, certs);
    if floor {
        r.trend = Trend::Bounded;
    }
    r.pass = r.trend != Trend::Diverging;
    Ok(r)
}

/// One row of the Steps 1–4 diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub alpha: f64,
    pub tau: f64,
    pub dt: f64,
    pub distance: f64,
}

/// `sup |Ũ_{α,τ} - ηU|` over `window × points` along a path of `(α, τ)`,
/// sampling `U` on `interval` with `dt = min(α, τ)/STEPS_PER_TAU` over the
/// positive entries.
#[allow(clippy::too_many_arguments)]
pub fn convergence_diagnostic<F>(
    u: F,
    like: &SpectralKernel,
    interval: (f64, f64),
    eta: &TimeCutoff,
    delta: &SpectralKernel,
    l: &SpectralKernel,
    path: &[(f64, f64)],
    window: (f64, f64),
    max_times: usize,
    points: &[GroupElement],
) -> Result<Vec<ConvergenceRow>>
where
    F: Fn(f64) -> Result<Vec<Coeff>> + Sync + Send,
{
    let irreps = std::sync::Arc::clone(like.irreps());
    path.iter()
        .map(|&(alpha, tau)| {
            let h = [alpha, tau].into_iter().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min) / STEPS_PER_TAU;
            let k0 = (interval.0 / h).ceil() as i64;
            let n = ((interval.1 / h).floor() as i64 - k0 + 1) as usize;
            let uf = SpaceTimeFunction::from_fn(
                like.spec().group(),
                std::sync::Arc::clone(&irreps),
                h,
                k0,
                n,
                false,
                Smoothness::BandLimited,
                &u,
            )?;
            let fam = two_param_family(&uf, eta, alpha, tau, delta, l)?;
            let target = uf.times_profile(|t| eta.eval(t));
            Ok(ConvergenceRow {
                alpha,
                tau,
                dt: h,
                distance: sup_distance(&fam, &target, window, max_times, points)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{quadrature::gauss_legendre, GroupSpec, Part};
    use crate::linalg::C64;
    use crate::operators::BiInvariantLaplacian;
    use crate::spectral::SpectralFunction;
    use std::sync::Arc;

    fn setup() -> (SubLaplacianSpec, SpectralKernel) {
        let g = GroupSpec::circle();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let k = SpectralKernel::build(&d, 16.0).unwrap();
        (d, k)
    }

    fn modes(k: &SpectralKernel, f: impl Fn(i32) -> f64) -> SpectralFunction {
        let coeffs = k.irreps().iter().map(|p| Coeff::Scalar(C64::new(f(p.labels[0]), 0.0))).collect();
        SpectralFunction::new(k.spec().group().clone(), Arc::clone(k.irreps()), coeffs, 0.0).unwrap()
    }

    fn pts() -> Vec<GroupElement> {
        (0..7).map(|i| GroupElement { parts: vec![Part::Circle(0.9 * i as f64)] }).collect()
    }

    #[test]
    fn separable_constant_profile() {
        let (_, k) = setup();
        let b = modes(&k, |n| 1.0 / (1.0 + (n * n) as f64));
        let dt = 0.001;
        let w = SpaceTimeFunction::separable(&b, dt, 0, 1001, false, Smoothness::Rough, |_| 1.0).unwrap();
        let tau = 0.05;
        let out = smooth_by_kernel(&w, tau, &k, (0.3, 0.7)).unwrap();
        let i = out.index_of(0.5).unwrap();
        let rho = BumpProfile.rho_tau(tau).unwrap();
        let (nodes, weights) = gauss_legendre(64);
        for (p, c) in k.irreps().iter().zip(&out.samples[i]) {
            let n = p.labels[0] as f64;
            let integral: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| {
                    let s = 1.5 * tau + 0.5 * tau * x;
                    0.5 * tau * w * rho.eval(s) * (-s * n * n).exp()
                })
                .sum();
            let expect = integral / (1.0 + n * n);
            let got = match c {
                Coeff::Scalar(z) => z.re,
                _ => unreachable!(),
            };
            assert!((got - expect).abs() < 1e-9, "n={n}: {got} vs {expect}");
        }
    }

    #[test]
    fn zero_and_bilinear() {
        let (_, k) = setup();
        let dt = 0.001;
        let b1 = modes(&k, |n| if n == 1 { 0.5 } else { 0.0 });
        let b2 = modes(&k, |n| if n.abs() == 3 { 0.2 } else { 0.0 });
        let step = |t: f64| if t < 0.5 { 0.0 } else { 1.0 };
        let w1 = SpaceTimeFunction::separable(&b1, dt, 0, 1001, false, Smoothness::Rough, step).unwrap();
        let w2 = SpaceTimeFunction::separable(&b2, dt, 0, 1001, false, Smoothness::Rough, |t| t).unwrap();
        let tau = 0.06;
        let zero = w1.combine(0.0, &w1, 0.0).unwrap();
        let z = smooth_by_kernel(&zero, tau, &k, (0.3, 0.7)).unwrap();
        assert!(z.samples.iter().flatten().all(|c| c.is_zero() || matches!(c, Coeff::Scalar(v) if v.norm() == 0.0)));
        let lhs = smooth_by_kernel(&w1.combine(2.0, &w2, -3.0).unwrap(), tau, &k, (0.3, 0.7)).unwrap();
        let rhs = smooth_by_kernel(&w1, tau, &k, (0.3, 0.7))
            .unwrap()
            .combine(2.0, &smooth_by_kernel(&w2, tau, &k, (0.3, 0.7)).unwrap(), -3.0)
            .unwrap();
        assert!(sup_distance(&lhs, &rhs, (0.3, 0.7), 0, &pts()).unwrap() < 1e-12);
    }

    #[test]
    fn associativity_for_compact_factors() {
        let (_, k) = setup();
        let dt = 0.0025;
        let b = modes(&k, |n| 0.3_f64.powi(n.abs()));
        let bump = |a: f64, c: f64| move |t: f64| if t > a && t < c { ((t - a) * (c - t)).powi(2) } else { 0.0 };
        let f = SpaceTimeFunction::separable(&b, dt, 0, 121, true, Smoothness::BandLimited, bump(0.0, 0.3)).unwrap();
        let g = kernel_profile(&k, &f, 0.1, 0.0).unwrap();
        let h = SpaceTimeFunction::separable(&b, dt, 20, 81, true, Smoothness::BandLimited, bump(0.05, 0.25)).unwrap();
        let l = spacetime_convolve(&spacetime_convolve(&f, &g).unwrap(), &h).unwrap();
        let r = spacetime_convolve(&f, &spacetime_convolve(&g, &h).unwrap()).unwrap();
        let (a, b) = (l.interval(), r.interval());
        assert!(sup_distance(&l, &r, (a.0.max(b.0), a.1.min(b.1)), 0, &pts()).unwrap() < 1e-12);
    }

    #[test]
    fn family_arguments() {
        let (_, k) = setup();
        let b = modes(&k, |n| if n == 0 { 1.0 } else { 0.0 });
        let u = SpaceTimeFunction::separable(&b, 0.005, 0, 201, false, Smoothness::Rough, |_| 1.0).unwrap();
        let eta = TimeCutoff::new((0.4, 0.6), (0.3, 0.7)).unwrap();
        assert!(two_param_family(&u, &eta, 0.0, 0.0, &k, &k).is_err());
        assert!(two_param_family(&u, &eta, 0.0, 0.5, &k, &k).is_err());
        assert!(smooth_by_kernel(&u, 0.2, &k, (0.4, 0.6)).is_err());
        assert!(check_tau_grid(&[0.1, 0.09, 0.08], 0.001).is_err());
        assert!(check_tau_grid(&[0.1, 0.08, 0.064], 0.001).is_ok());
        assert!(check_tau_grid(&[0.1, 0.08, 0.064], 0.005).is_err());
    }

    #[test]
    fn diagnostic_shrinks() {
        let g = GroupSpec::circle();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let dk = SpectralKernel::build(&d, 16.0).unwrap();
        let l = SpectralKernel::build_on(&d.scaled(1.5).unwrap(), Arc::clone(dk.irreps()), 16.0).unwrap();
        let eta = TimeCutoff::new((0.4, 0.6), (0.3, 0.7)).unwrap();
        let u0: Vec<f64> = dk.irreps().iter().map(|p| 0.5_f64.powi(p.labels[0].abs())).collect();
        let lb = l.clone();
        let u = move |t: f64| {
            Ok(lb.blocks().iter().zip(&u0).map(|(b, c)| b.apply(|x| c * (-t * x).exp())).collect())
        };
        let rows = convergence_diagnostic(
            u,
            &dk,
            (0.0, 1.0),
            &eta,
            &dk,
            &l,
            &[(0.04, 0.04), (0.01, 0.01)],
            (0.4, 0.6),
            0,
            &pts(),
        )
        .unwrap();
        assert!(rows[1].distance < 0.5 * rows[0].distance, "{rows:?}");
    }
}

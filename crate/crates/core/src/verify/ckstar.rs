//! Scans of `t · M_L(t)` with `M_L(t) = log μ_t^L(e)`.

use serde::Serialize;

use super::{ScanResult, Trend};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::heatkernel::{required_cutoff, SpectralKernel};
use crate::operators::{BiInvariantLaplacian, SubLaplacianSpec};

/// Tail certificate required at the smallest time of a CK* scan.
pub const CK_TAIL_TOL: f64 = 1e-8;

fn t_min(t_grid: &[f64]) -> Result<f64> {
    let t = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if t_grid.is_empty() || !(t > 0.0) {
        return Err(Error::Argument("time grid must be non-empty and positive".into()));
    }
    Ok(t)
}

/// Builds a kernel whose tail at the smallest grid time is at most `1e-8`,
/// then scans.
pub fn ck_star_scan(spec: &SubLaplacianSpec, t_grid: &[f64], max_cutoff: f64) -> Result<ScanResult> {
    let cutoff = required_cutoff(spec, t_min(t_grid)?, CK_TAIL_TOL, 0.0, 1.0, max_cutoff)?;
    ck_star_scan_kernel(&SpectralKernel::build(spec, cutoff)?, t_grid)
}

/// Scans `t · M_L(t)` with an existing kernel; rejects grids reaching below
/// the kernel's certified range.
pub fn ck_star_scan_kernel(kernel: &SpectralKernel, t_grid: &[f64]) -> Result<ScanResult> {
    let tm = t_min(t_grid)?;
    if kernel.tail_bound(tm, 0.0)? > CK_TAIL_TOL {
        let required = required_cutoff(kernel.spec(), tm, CK_TAIL_TOL, 0.0, 1.0, f64::INFINITY)?;
        return Err(Error::Truncation {
            tolerance: CK_TAIL_TOL,
            required_cutoff: required,
            max_cutoff: kernel.cutoff(),
        });
    }
    let rows: Vec<Result<(f64, f64)>> = crate::exec::map(t_grid, |&t| {
        let v = kernel.on_diag(t)?;
        Ok(log_with_certificate(t, v.value, v.abs_error))
    });
    let rows: Vec<(f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
    Ok(finish(t_grid, rows))
}

/// `(t·log μ, t·|δ log μ|)` with `|δ log μ| ≤ err / (μ - err)`.
fn log_with_certificate(t: f64, mu: f64, err: f64) -> (f64, f64) {
    let m = mu.max(f64::MIN_POSITIVE).ln();
    let d = if mu > err { err / (mu - err) } else { f64::INFINITY };
    (t * m, t * d)
}

fn finish(t_grid: &[f64], rows: Vec<(f64, f64)>) -> ScanResult {
    let (values, certs): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let mut r = ScanResult::new(
        vec!["t".into()],
        t_grid.iter().map(|&t| vec![t]).collect(),
        values,
        certs,
    );
    r.pass = r.pass && r.trend == Trend::Decreasing;
    r
}

/// Product of circles with weights `w_i = base^i` (`i ≥ 1`), of which the
/// first `d` factors are instantiated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleProduct {
    pub base: f64,
    pub d: usize,
}

impl CircleProduct {
    pub fn weight(&self, i: usize) -> f64 {
        self.base.powi(i as i32)
    }
}

/// Majorant of `Σ_{i>d} log θ(w_i t)`, `θ(x) = Σ_n e^{-xn²}`.
///
/// Each term is bounded by `log(1 + min(sqrt(π/x), g(x)))` with
/// `g(x) = 2e^{-x}/(1-e^{-x})`, since `θ(x) - 1` is below both the Gaussian
/// integral and the geometric series. Terms are summed explicitly until
/// `x ≥ 1` and `g` is below `1e-17` of the running sum; from there consecutive
/// `g` shrink at least by `ρ = e^{-(base-1)x}` and the rest is a geometric series.
pub fn circle_product_tail(p: &CircleProduct, t: f64) -> Result<f64> {
    if !(p.base > 1.0) || !(t > 0.0) {
        return Err(Error::Argument("circle product needs base > 1 and t > 0".into()));
    }
    let g = |x: f64| 2.0 * (-x).exp() / -(-x).exp_m1();
    let mut sum = 0.0;
    let mut i = p.d + 1;
    loop {
        let x = p.weight(i) * t;
        let gx = g(x);
        sum += (std::f64::consts::PI / x).sqrt().min(gx).ln_1p();
        if x >= 1.0 && (gx <= 1e-17 * sum || gx == 0.0) {
            let rho = (-(p.base - 1.0) * x).exp();
            return Ok(sum + gx * rho / (1.0 - rho));
        }
        i += 1;
    }
}

/// CK* scan for the weighted circle product, summing per-factor
/// `log μ_t^{(i)}(e)` from one-dimensional kernels plus the analytic majorant
/// for the factors beyond `d`. Returns the scan and the largest majorant.
pub fn ck_star_circle_product(p: &CircleProduct, t_grid: &[f64], max_cutoff: f64) -> Result<(ScanResult, f64)> {
    let tm = t_min(t_grid)?;
    if p.d == 0 {
        return Err(Error::Argument("circle product needs at least one factor".into()));
    }
    let g = GroupSpec::circle();
    let kernels: Vec<SpectralKernel> = (1..=p.d)
        .map(|i| {
            let reference = BiInvariantLaplacian::new(&g, vec![p.weight(i)])?;
            let spec = SubLaplacianSpec::laplacian(g.clone(), reference);
            let cutoff = required_cutoff(&spec, tm, 1e-14, 0.0, 1.0, max_cutoff * p.weight(i))?;
            SpectralKernel::build(&spec, cutoff)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Result<(f64, f64, f64)>> = crate::exec::map(t_grid, |&t| {
        let mut m = crate::linalg::Kahan::default();
        let mut err = 0.0;
        for k in &kernels {
            let v = k.on_diag(t)?;
            let (lm, dm) = log_with_certificate(1.0, v.value, v.abs_error);
            m.add(lm);
            err += dm;
        }
        let tail = circle_product_tail(p, t)?;
        Ok((t * m.value(), t * (err + tail), tail))
    });
    let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
    let majorant = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok((finish(t_grid, rows.into_iter().map(|r| (r.0, r.1)).collect()), majorant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::log_grid;

    fn theta(s: f64) -> f64 {
        1.0 + 2.0 * (1..2000).map(|n| (-s * (n * n) as f64).exp()).sum::<f64>()
    }

    #[test]
    fn circle_product_matches_theta_sums() {
        let p = CircleProduct { base: 4.0, d: 8 };
        let grid = log_grid(1.0, 1e-3, 8);
        let (scan, majorant) = ck_star_circle_product(&p, &grid, 1e9).unwrap();
        assert!(majorant < 1e-6);
        for (t, v) in grid.iter().zip(&scan.values) {
            let direct: f64 = (1..=8).map(|i| theta(4f64.powi(i) * t).ln()).sum::<f64>() * t;
            assert!((v - direct).abs() < 1e-12, "{t} {v} {direct}");
        }
        assert_eq!(scan.trend, Trend::Decreasing);
        assert!(scan.last() < 0.05);
    }

    #[test]
    fn tail_majorant_dominates_direct_tail() {
        let p = CircleProduct { base: 4.0, d: 2 };
        for t in [1e-3, 0.01, 0.1] {
            let direct: f64 = (3..40).map(|i| theta(4f64.powi(i) * t).ln()).sum();
            let bound = circle_product_tail(&p, t).unwrap();
            assert!(bound >= direct && bound <= 1.5 * direct + 1e-300, "{t} {bound} {direct}");
        }
    }

    #[test]
    fn infeasible_grid_reports_required_cutoff() {
        let g = GroupSpec::su2();
        let spec = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let k = SpectralKernel::build(&spec, 20.0).unwrap();
        match ck_star_scan_kernel(&k, &[0.1, 0.01]) {
            Err(Error::Truncation { required_cutoff, .. }) => assert!(required_cutoff > 20.0),
            other => panic!("{other:?}"),
        }
    }
}

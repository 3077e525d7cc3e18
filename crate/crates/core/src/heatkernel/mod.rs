//! Heat-kernel densities `μ_t^L(x) = Σ_π d_π tr(e^{-tΛ_π} π(x))`.

pub mod tail;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{irrep_enumerate, GroupElement, IrrepIndex};
use crate::linalg::{HermitianEigen, C64};
use crate::operators::{Block, ComparabilityCertificate, ComparabilityMethod, SubLaplacianSpec};
use crate::spectral::{Coeff, SpectralFunction};

pub use tail::tail_sum;

/// `Λ_π` with its eigendecomposition when not scalar.
#[derive(Debug, Clone)]
pub enum KernelBlock {
    Scalar(f64),
    Dense(HermitianEigen),
}

impl KernelBlock {
    /// `φ(Λ_π)` by functional calculus.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Coeff {
        match self {
            KernelBlock::Scalar(l) => Coeff::Scalar(C64::new(f(*l), 0.0)),
            KernelBlock::Dense(e) => Coeff::Dense(e.apply(|l| C64::new(f(l), 0.0))),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            KernelBlock::Scalar(l) => *l,
            KernelBlock::Dense(e) => e.min(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub t: f64,
    pub value: f64,
    /// Truncation plus roundoff, plus any imaginary residual of the sum.
    pub abs_error: f64,
}

/// Spectral data of `μ_t^L` on an enumerated set of irreps.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    spec: SubLaplacianSpec,
    cert: ComparabilityCertificate,
    irreps: Arc<Vec<IrrepIndex>>,
    blocks: Vec<KernelBlock>,
    cutoff: f64,
}

impl SpectralKernel {
    /// Enumerates all irreps with reference Casimir `≤ cutoff` and diagonalizes
    /// each `Λ_π`. Requires `c > 0` so that tails can be certified.
    pub fn build(spec: &SubLaplacianSpec, cutoff: f64) -> Result<Self> {
        let irreps = irrep_enumerate(spec.group(), spec.reference().weights(), cutoff)?;
        Self::build_on(spec, Arc::new(irreps), cutoff)
    }

    /// Builds on a shared enumeration, which must be the reference enumeration at `cutoff`.
    pub fn build_on(spec: &SubLaplacianSpec, irreps: Arc<Vec<IrrepIndex>>, cutoff: f64) -> Result<Self> {
        let cert = spec.comparability(ComparabilityMethod::Eigen)?;
        let blocks = crate::exec::try_map(&irreps, |pi| -> Result<KernelBlock> {
            Ok(match spec.dpi(pi)? {
                Block::Scalar(l) => KernelBlock::Scalar(l),
                Block::Dense(m) => KernelBlock::Dense(HermitianEigen::new(&m)),
            })
        })?;
        Ok(SpectralKernel {
            spec: spec.clone(),
            cert,
            irreps,
            blocks,
            cutoff,
        })
    }

    /// Smallest cutoff (on a geometric ladder) whose tail bound at `t_min`, for
    /// derivative degree `q` with prefactor `gain`, is at most `tol`.
    pub fn for_tolerance(
        spec: &SubLaplacianSpec,
        t_min: f64,
        tol: f64,
        q: f64,
        gain: f64,
        max_cutoff: f64,
    ) -> Result<Self> {
        let cutoff = required_cutoff(spec, t_min, tol, q, gain, max_cutoff)?;
        Self::build(spec, cutoff)
    }

    /// The kernel on the irreps with reference Casimir `≤ cutoff` (a prefix of
    /// the enumeration); `cutoff` above the current one changes nothing.
    pub fn restricted(&self, cutoff: f64) -> SpectralKernel {
        if cutoff >= self.cutoff {
            return self.clone();
        }
        let w = self.spec.reference().weights();
        let g = self.spec.group();
        let n = self.irreps.iter().take_while(|p| g.casimir(p, w) <= cutoff).count();
        SpectralKernel {
            spec: self.spec.clone(),
            cert: self.cert,
            irreps: Arc::new(self.irreps[..n].to_vec()),
            blocks: self.blocks[..n].to_vec(),
            cutoff,
        }
    }

    pub fn spec(&self) -> &SubLaplacianSpec {
        &self.spec
    }

    pub fn certificate(&self) -> ComparabilityCertificate {
        self.cert
    }

    pub fn irreps(&self) -> &Arc<Vec<IrrepIndex>> {
        &self.irreps
    }

    pub fn blocks(&self) -> &[KernelBlock] {
        &self.blocks
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Sup-norm bound on the omitted terms of any chain of Casimir degree `q`
    /// (prefactor not included) at time `t`.
    pub fn tail_bound(&self, t: f64, q: f64) -> Result<f64> {
        check_t(t)?;
        tail_sum(
            self.spec.group(),
            self.spec.reference().weights(),
            t * self.cert.c,
            self.cutoff,
            q,
        )
    }

    /// Coefficients `φ(Λ_π)`.
    pub fn calculus<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> Vec<Coeff> {
        crate::exec::map(&self.blocks, |b| b.apply(&f))
    }

    /// `μ_t` as a spectral function.
    pub fn at(&self, t: f64) -> Result<SpectralFunction> {
        self.derivative_at(t, 0)
    }

    /// `∂_t^a μ_t`, coefficients `(-Λ)^a e^{-tΛ}`.
    pub fn derivative_at(&self, t: f64, a: u32) -> Result<SpectralFunction> {
        check_t(t)?;
        let coeffs = self.calculus(|l| (-l).powi(a as i32) * (-t * l).exp());
        let truncation = self.cert.big_c.powi(a as i32) * self.tail_bound(t, a as f64)?;
        SpectralFunction::new(self.spec.group().clone(), Arc::clone(&self.irreps), coeffs, truncation)
    }

    pub fn heat_density(&self, t: f64, x: &GroupElement) -> Result<DensityValue> {
        self.time_derivative(t, x, 0)
    }

    /// `∂_t^a μ_t(x)`.
    pub fn time_derivative(&self, t: f64, x: &GroupElement, a: u32) -> Result<DensityValue> {
        let f = self.derivative_at(t, a)?;
        let e = f.eval(x)?;
        Ok(DensityValue {
            t,
            value: e.value.re,
            abs_error: e.abs_error + e.value.im.abs(),
        })
    }

    /// Densities at many points, in input order.
    pub fn densities(&self, t: f64, xs: &[GroupElement]) -> Result<Vec<DensityValue>> {
        let f = self.at(t)?;
        let err = f.truncation + f.roundoff_scale();
        crate::exec::try_map(xs, |x| {
            self.spec.group().check(x)?;
            let v = f.eval_with(&f.rep_table(x));
            Ok(DensityValue {
                t,
                value: v.re,
                abs_error: err + v.im.abs(),
            })
        })
    }

    /// `M_L(t) = log μ_t(e)`, clamping non-positive values to the smallest
    /// positive float before the logarithm.
    pub fn on_diag_log(&self, t: f64) -> Result<f64> {
        let v = self.heat_density(t, &self.spec.group().identity())?;
        Ok(v.value.max(f64::MIN_POSITIVE).ln())
    }

    /// `μ_t` at the identity with certificate.
    pub fn on_diag(&self, t: f64) -> Result<DensityValue> {
        self.heat_density(t, &self.spec.group().identity())
    }
}

/// Spectral `μ_t^{L1} * μ_s^{L2}` with blocks `e^{-sΛ²} e^{-tΛ¹}`.
pub fn convolve_spectral(k1: &SpectralKernel, t: f64, k2: &SpectralKernel, s: f64) -> Result<SpectralFunction> {
    if k1.spec.group() != k2.spec.group() || k1.irreps != k2.irreps {
        return Err(Error::Structural(
            "kernels must share the group and the irrep enumeration".into(),
        ));
    }
    let a = k1.at(t)?;
    let b = k2.at(s)?;
    let mut c = a.convolve(&b)?;
    // each omitted block is bounded by either factor's decay
    c.truncation = k1.tail_bound(t, 0.0)?.min(k2.tail_bound(s, 0.0)?);
    Ok(c)
}

/// Tail bound for `L` at `t` beyond `cutoff` (no derivatives).
pub fn tail_bound(spec: &SubLaplacianSpec, t: f64, cutoff: f64) -> Result<f64> {
    check_t(t)?;
    let cert = spec.comparability(ComparabilityMethod::Eigen)?;
    tail_sum(spec.group(), spec.reference().weights(), t * cert.c, cutoff, 0.0)
}

/// Smallest cutoff on the ladder `4·1.25^k` meeting `gain · tail ≤ tol` at `t`.
pub fn required_cutoff(
    spec: &SubLaplacianSpec,
    t: f64,
    tol: f64,
    q: f64,
    gain: f64,
    max_cutoff: f64,
) -> Result<f64> {
    check_t(t)?;
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let cert = spec.comparability(ComparabilityMethod::Eigen)?;
    let s = t * cert.c;
    let mut cutoff: f64 = 4.0;
    loop {
        let b = gain * tail_sum(spec.group(), spec.reference().weights(), s, cutoff, q)?;
        if b <= tol {
            if cutoff > max_cutoff {
                return Err(Error::Truncation {
                    tolerance: tol,
                    required_cutoff: cutoff,
                    max_cutoff,
                });
            }
            return Ok(cutoff);
        }
        if cutoff > 1e3 * max_cutoff.max(1.0) {
            return Err(Error::Truncation {
                tolerance: tol,
                required_cutoff: f64::INFINITY,
                max_cutoff,
            });
        }
        cutoff *= 1.25;
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Argument(format!("time t = {t} must be positive")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::operators::BiInvariantLaplacian;

    fn circle_delta() -> SubLaplacianSpec {
        let g = GroupSpec::circle();
        SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g))
    }

    #[test]
    fn circle_density_at_identity() {
        let k = SpectralKernel::build(&circle_delta(), 100.0).unwrap();
        let v = k.on_diag(1.0).unwrap();
        let oracle = 1.0 + 2.0 * (1..=10).map(|n: i32| (-(n * n) as f64).exp()).sum::<f64>();
        assert!((v.value - oracle).abs() < 1e-12);
        assert!(v.abs_error < 1e-12);
    }

    #[test]
    fn large_time_is_uniform() {
        let k = SpectralKernel::build(&circle_delta(), 16.0).unwrap();
        let x = GroupSpec::circle().exp_dir(0, 1.0).unwrap();
        assert!((k.heat_density(50.0, &x).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let k = SpectralKernel::build(&circle_delta(), 200.0).unwrap();
        let e = GroupSpec::circle().identity();
        let h = 1e-4;
        let fd = (k.heat_density(1.0 + h, &e).unwrap().value - k.heat_density(1.0 - h, &e).unwrap().value) / (2.0 * h);
        let d = k.time_derivative(1.0, &e, 1).unwrap().value;
        assert!(((d - fd) / d).abs() < 1e-6);
    }

    #[test]
    fn semigroup_blockwise() {
        let k = SpectralKernel::build(&circle_delta(), 50.0).unwrap();
        let c = convolve_spectral(&k, 0.3, &k, 0.4).unwrap();
        let direct = k.at(0.7).unwrap();
        for (a, b) in c.coeffs.iter().zip(&direct.coeffs) {
            assert!(a.add(&b.scale(C64::new(-1.0, 0.0)), 1).frobenius(1) < 1e-15);
        }
    }

    #[test]
    fn tolerance_failure_reports_cutoff() {
        let err = SpectralKernel::for_tolerance(&circle_delta(), 1e-4, 1e-12, 0.0, 1.0, 50.0).unwrap_err();
        match err {
            Error::Truncation { required_cutoff, .. } => assert!(required_cutoff > 50.0),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn su2_density_and_symmetry() {
        let g = GroupSpec::su2();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let k = SpectralKernel::build(&d, 60.0).unwrap();
        let oracle: f64 = (0..=10).map(|tj| {
            let j = tj as f64 / 2.0;
            (2.0 * j + 1.0).powi(2) * (-j * (j + 1.0)).exp()
        }).sum();
        assert!((k.on_diag(1.0).unwrap().value - oracle).abs() < 1e-9);

        let a = crate::linalg::RMat::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.0, 0.0, 0.0, 0.0, 1.5]);
        let l = SubLaplacianSpec::new(g.clone(), a, BiInvariantLaplacian::unit(&g)).unwrap();
        let kl = SpectralKernel::build(&l, 60.0).unwrap();
        let x = g.exp_vec(&[0.4, -0.9, 1.3]).unwrap();
        let v = kl.heat_density(0.5, &x).unwrap();
        let w = kl.heat_density(0.5, &g.inverse(&x).unwrap()).unwrap();
        assert!((v.value - w.value).abs() <= v.abs_error + w.abs_error);
        assert!(v.value > 0.0);
    }
}

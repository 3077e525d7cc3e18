//! Representation and semigroup sanity checks: homomorphism, unitarity,
//! Schur orthogonality, the semigroup law in blocks and in space,
//! normalization, symmetry, positivity and the centrality dichotomy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{irrep_enumerate, quadrature_for_pairs, GroupElement, GroupSpec, IrrepIndex, QuadratureRule};
use crate::heatkernel::SpectralKernel;
use crate::linalg::{max_abs, CMat, C64};
use crate::spectral::RepTable;

/// Step of the central differences checking `dπ(X_i)`.
pub const GENERATOR_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub irreps: usize,
    pub homomorphism: f64,
    pub unitarity: f64,
    pub schur: f64,
    /// Largest `|(π(exp(hX)) - π(exp(-hX)))/2h - dπ(X)|`.
    pub generator: f64,
    pub pass: bool,
}

/// Residuals of every irrep with Casimir `≤ cutoff` over `samples` pairs
/// (homomorphism) and points (unitarity), plus Schur orthogonality on a rule
/// exact for all pairwise coefficient products.
pub fn representation_check(
    group: &GroupSpec,
    weights: &[f64],
    cutoff: f64,
    samples: &[GroupElement],
    tol: f64,
) -> Result<RepresentationReport> {
    let irreps = irrep_enumerate(group, weights, cutoff)?;
    if samples.len() < 2 {
        return Err(Error::Argument("at least two sample points are required".into()));
    }
    let dense = vec![true; irreps.len()];
    let table = |x: &GroupElement| RepTable::new(group, &irreps, &dense, x);
    let pairs: Vec<(usize, usize)> = (0..samples.len())
        .flat_map(|i| (0..samples.len()).map(move |j| (i, j)))
        .collect();
    let tables: Vec<RepTable> = crate::exec::map(samples, table);
    let homomorphism = crate::exec::try_map(&pairs, |&(i, j)| -> Result<f64> {
        let xy = table(&group.multiply(&samples[i], &samples[j])?);
        Ok(irreps
            .iter()
            .map(|p| max_abs(&(xy.matrix(p) - tables[i].matrix(p) * tables[j].matrix(p))))
            .fold(0.0, f64::max))
    })?
    .into_iter()
    .fold(0.0, f64::max);
    let unitarity = tables
        .iter()
        .flat_map(|t| {
            irreps.iter().map(move |p| {
                let m = t.matrix(p);
                max_abs(&(&m * m.adjoint() - CMat::identity(m.nrows(), m.nrows())))
            })
        })
        .fold(0.0, f64::max);
    let generator = generator_residual(group, &irreps)?;
    let schur = schur_residual(group, &irreps, &quadrature_for_pairs(group, &irreps)?);
    Ok(RepresentationReport {
        irreps: irreps.len(),
        homomorphism,
        unitarity,
        schur,
        generator,
        pass: homomorphism <= tol && unitarity <= tol && schur <= tol && generator <= 1e-6,
    })
}

fn generator_residual(group: &GroupSpec, irreps: &[IrrepIndex]) -> Result<f64> {
    let h = GENERATOR_STEP;
    let mut worst: f64 = 0.0;
    for i in 0..group.basis_len() {
        let plus = group.exp_dir(i, h)?;
        let minus = group.exp_dir(i, -h)?;
        for p in irreps {
            let fd = (group.rep_matrix(p, &plus)? - group.rep_matrix(p, &minus)?) * C64::new(0.5 / h, 0.0);
            worst = worst.max(max_abs(&(fd - group.generator_matrix(p, i)?)));
        }
    }
    Ok(worst)
}

/// `max |∫ π_ij conj(σ_kl) - δ/d_π|` over all coefficient pairs.
fn schur_residual(group: &GroupSpec, irreps: &[IrrepIndex], rule: &QuadratureRule) -> f64 {
    let dims: Vec<usize> = irreps.iter().map(|p| group.irrep_dim(p)).collect();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, d| {
            let o = *acc;
            *acc += d * d;
            Some(o)
        })
        .collect();
    let total: usize = dims.iter().map(|d| d * d).sum();
    let dense = vec![true; irreps.len()];
    // rows: nodes, columns: sqrt(w) π_ij(x)
    let rows: Vec<Vec<C64>> = crate::exec::map(&(0..rule.len()).collect::<Vec<_>>(), |&k| {
        let t = RepTable::new(group, irreps, &dense, &rule.nodes[k]);
        let s = rule.weights[k].sqrt();
        let mut row = Vec::with_capacity(total);
        for p in irreps {
            let m = t.matrix(p);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    row.push(m[(i, j)] * s);
                }
            }
        }
        row
    });
    let m = CMat::from_fn(rule.len(), total, |k, c| rows[k][c]);
    let cols: Vec<usize> = (0..total).collect();
    let expected = |c: usize| {
        let p = offsets.partition_point(|&o| o <= c) - 1;
        1.0 / dims[p] as f64
    };
    crate::exec::map(&cols, |&b| {
        let col = m.column(b);
        (0..total)
            .map(|a| {
                let g = m.column(a).dotc(&col);
                let e = if a == b { expected(b) } else { 0.0 };
                (g - C64::new(e, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemigroupReport {
    pub t: f64,
    pub s: f64,
    /// `max_π ‖e^{-tΛ}e^{-sΛ} - e^{-(t+s)Λ}‖`.
    pub blockwise: f64,
    /// `max_x |∫ μ_t(z) μ_s(z⁻¹x) dz - μ_{t+s}(x)|` over `points`.
    pub spatial: f64,
    pub spatial_certificate: f64,
    /// `|∫ μ_t - 1|` by quadrature.
    pub normalization: f64,
    /// Largest `|μ_t(x) - μ_t(x⁻¹)|` in units of the summed certificates.
    pub symmetry_ratio: f64,
    /// Smallest `μ_t + abs_error` over the quadrature nodes.
    pub positivity_margin: f64,
    pub pass: bool,
}

pub const SEMIGROUP_BLOCK_TOL: f64 = 1e-12;
pub const SEMIGROUP_SPATIAL_TOL: f64 = 1e-6;
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Semigroup law, normalization, symmetry and positivity of `μ_t`.
pub fn semigroup_check(kernel: &SpectralKernel, t: f64, s: f64, points: &[GroupElement]) -> Result<SemigroupReport> {
    let group = kernel.spec().group();
    let blockwise = kernel
        .blocks()
        .iter()
        .zip(kernel.irreps().iter())
        .map(|(b, p)| {
            let d = group.irrep_dim(p);
            let prod = b.apply(|l| (-t * l).exp()).to_matrix(d) * b.apply(|l| (-s * l).exp()).to_matrix(d);
            max_abs(&(prod - b.apply(|l| (-(t + s) * l).exp()).to_matrix(d)))
        })
        .fold(0.0, f64::max);
    let rule = quadrature_for_pairs(group, kernel.irreps())?;
    let ft = kernel.at(t)?;
    let fs = kernel.at(s)?;
    let fts = kernel.at(t + s)?;
    let at_nodes = kernel.densities(t, &rule.nodes)?;
    let vt: Vec<f64> = at_nodes.iter().map(|d| d.value).collect();
    let mut spatial: f64 = 0.0;
    for x in points {
        let shifted: Vec<GroupElement> = rule
            .nodes
            .iter()
            .map(|z| group.multiply(&group.inverse(z)?, x))
            .collect::<Result<_>>()?;
        let vs = fs.eval_real_many(&shifted);
        let prod: Vec<f64> = vt.iter().zip(&vs).map(|(a, b)| a * b).collect();
        let conv = rule.integrate_values(&prod);
        spatial = spatial.max((conv - fts.eval(x)?.value.re).abs());
    }
    // the rule is exact on the truncated kernels, so only the omitted tails
    // separate the two sides from the true densities
    let spatial_certificate = ft.truncation + fs.truncation + fts.truncation;
    let normalization = (rule.integrate_values(&vt) - 1.0).abs();
    let mut symmetry_ratio: f64 = 0.0;
    for x in points {
        let a = ft.eval(x)?;
        let b = ft.eval(&group.inverse(x)?)?;
        let cert = (a.abs_error + b.abs_error).max(f64::MIN_POSITIVE);
        symmetry_ratio = symmetry_ratio.max((a.value.re - b.value.re).abs() / cert);
    }
    let positivity_margin = at_nodes
        .iter()
        .map(|d| d.value + d.abs_error)
        .fold(f64::INFINITY, f64::min);
    let pass = blockwise <= SEMIGROUP_BLOCK_TOL
        && spatial <= SEMIGROUP_SPATIAL_TOL
        && normalization <= NORMALIZATION_TOL
        && symmetry_ratio <= 1.0
        && positivity_margin >= 0.0;
    Ok(SemigroupReport {
        t,
        s,
        blockwise,
        spatial,
        spatial_certificate,
        normalization,
        symmetry_ratio,
        positivity_margin,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    pub bi_invariant: bool,
    /// Largest `|μ_t(gxg⁻¹) - μ_t(x)|` divided by the summed certificates.
    pub max_ratio: f64,
    pub witness_g: Vec<f64>,
    pub witness_x: Vec<f64>,
    pub pass: bool,
}

/// For bi-invariant operators every ratio must stay `≤ 1`; otherwise some
/// sampled pair must exceed `10`.
pub fn centrality_check(kernel: &SpectralKernel, t: f64, samples: usize, seed: u64) -> Result<CentralityReport> {
    let spec = kernel.spec();
    let group = spec.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(GroupElement, GroupElement)> = (0..samples)
        .map(|_| (group.random_element(&mut rng), group.random_element(&mut rng)))
        .collect();
    let f = kernel.at(t)?;
    let ratios = crate::exec::try_map(&pairs, |(g, x)| -> Result<f64> {
        let a = f.eval(x)?;
        let b = f.eval(&group.conjugate(g, x)?)?;
        Ok((a.value.re - b.value.re).abs() / (a.abs_error + b.abs_error).max(f64::MIN_POSITIVE))
    })?;
    let (i, &max_ratio) = ratios
        .iter()
        .enumerate()
        .fold((0, &0.0), |acc, (i, r)| if *r > *acc.1 { (i, r) } else { acc });
    let bi_invariant = spec.is_bi_invariant();
    Ok(CentralityReport {
        bi_invariant,
        max_ratio,
        witness_g: element_coords(&pairs[i].0),
        witness_x: element_coords(&pairs[i].1),
        pass: if bi_invariant { max_ratio <= 1.0 } else { max_ratio > 10.0 },
    })
}

/// Angles for circles, `(w, x, y, z)` for SU(2).
pub fn element_coords(x: &GroupElement) -> Vec<f64> {
    x.parts
        .iter()
        .flat_map(|p| match p {
            crate::group::Part::Circle(a) => vec![*a],
            crate::group::Part::SU2(q) => vec![q.w, q.i, q.j, q.k],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{BiInvariantLaplacian, SubLaplacianSpec};

    #[test]
    fn circle_representations() {
        let g = GroupSpec::circle();
        let xs: Vec<GroupElement> = (0..4).map(|i| g.exp_dir(0, 0.7 * i as f64 + 0.1).unwrap()).collect();
        let r = representation_check(&g, &[1.0], 12.0, &xs, 1e-10).unwrap();
        assert_eq!(r.irreps, 7);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn circle_semigroup() {
        let g = GroupSpec::circle();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let k = SpectralKernel::build(&d, 400.0).unwrap();
        let xs: Vec<GroupElement> = (0..5).map(|i| g.exp_dir(0, 1.3 * i as f64).unwrap()).collect();
        let r = semigroup_check(&k, 0.3, 0.2, &xs).unwrap();
        assert!(r.pass, "{r:?}");
        let c = centrality_check(&k, 0.3, 16, 7).unwrap();
        assert!(c.bi_invariant && c.pass);
    }
}

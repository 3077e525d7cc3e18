//! Bi-invariant Laplacians, left-invariant sub-Laplacians `L = -Σ a_ij X_i X_j`,
//! form comparability and basis changes.

use nalgebra::SVD;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FactorKind, GroupSpec, IrrepIndex};
use crate::linalg::{symmetric_eigenvalues, CMat, RMat, C64};

/// PSD tolerance on the smallest eigenvalue of `A`.
pub const PSD_TOL: f64 = -1e-10;

/// `Δ = Σ_f w_f Casimir_f`, i.e. `A = diag` of the slot weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BiInvariantLaplacian {
    weights: Vec<f64>,
}

impl BiInvariantLaplacian {
    pub fn new(spec: &GroupSpec, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != spec.num_factors() {
            return Err(Error::Structural(format!(
                "{} weights for {} factors",
                weights.len(),
                spec.num_factors()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Argument("Laplacian weights must be positive".into()));
        }
        Ok(BiInvariantLaplacian { weights })
    }

    pub fn unit(spec: &GroupSpec) -> Self {
        BiInvariantLaplacian {
            weights: vec![1.0; spec.num_factors()],
        }
    }

    /// Per-factor weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of every generator slot (constant across an SU(2) factor).
    pub fn slot_weights(&self, spec: &GroupSpec) -> Vec<f64> {
        spec.factors()
            .iter()
            .zip(&self.weights)
            .flat_map(|(f, &w)| std::iter::repeat_n(w, f.slots()))
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        BiInvariantLaplacian {
            weights: self.weights.iter().map(|w| w * s).collect(),
        }
    }
}

/// Banded coefficient rule: `a_ii = diagonal_scale · w_i` and
/// `a_{i,i+k} = off_diagonal[k-1] · sqrt(w_i w_{i+k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandedRule {
    pub diagonal_scale: f64,
    #[serde(default)]
    pub off_diagonal: Vec<f64>,
}

impl BandedRule {
    pub fn matrix(&self, slot_weights: &[f64]) -> RMat {
        let n = slot_weights.len();
        RMat::from_fn(n, n, |i, j| {
            let (lo, hi) = (i.min(j), i.max(j));
            let k = hi - lo;
            if k == 0 {
                self.diagonal_scale * slot_weights[i]
            } else if k <= self.off_diagonal.len() {
                self.off_diagonal[k - 1] * (slot_weights[lo] * slot_weights[hi]).sqrt()
            } else {
                0.0
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparabilityMethod {
    Eigen,
    Gershgorin,
}

/// `c Σ w_i ξ_i² ≤ ξᵀAξ ≤ C Σ w_i ξ_i²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityCertificate {
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub method: ComparabilityMethod,
}

/// Per-irrep block `Λ_π = -Σ a_ij dπ(X_i) dπ(X_j)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// `λ · I` (bi-invariant operators, by Schur's lemma).
    Scalar(f64),
    Dense(CMat),
}

impl Block {
    pub fn to_matrix(&self, dim: usize) -> CMat {
        match self {
            Block::Scalar(l) => CMat::identity(dim, dim) * C64::new(*l, 0.0),
            Block::Dense(m) => m.clone(),
        }
    }
}

/// `L = -Σ a_ij X_i X_j` with `A` real symmetric PSD, plus the reference `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubLaplacianSpec {
    group: GroupSpec,
    a: RMat,
    reference: BiInvariantLaplacian,
}

impl SubLaplacianSpec {
    /// Builds from the upper triangle of `a`; the strict lower triangle is ignored.
    pub fn new(group: GroupSpec, a: RMat, reference: BiInvariantLaplacian) -> Result<Self> {
        let n = group.basis_len();
        if a.shape() != (n, n) {
            return Err(Error::Structural(format!(
                "coefficient matrix is {}x{}, basis has {n} slots",
                a.nrows(),
                a.ncols()
            )));
        }
        if reference.weights.len() != group.num_factors() {
            return Err(Error::Structural("reference weights do not match group".into()));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("coefficient matrix has non-finite entries".into()));
        }
        let sym = RMat::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
        let min = symmetric_eigenvalues(&sym)[0];
        if min < PSD_TOL {
            return Err(Error::Argument(format!(
                "coefficient matrix is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(SubLaplacianSpec {
            group,
            a: sym,
            reference,
        })
    }

    /// The reference `Δ` itself as a sub-Laplacian.
    pub fn laplacian(group: GroupSpec, reference: BiInvariantLaplacian) -> Self {
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(reference.slot_weights(&group)));
        SubLaplacianSpec {
            group,
            a,
            reference,
        }
    }

    pub fn banded(group: GroupSpec, reference: BiInvariantLaplacian, rule: &BandedRule) -> Result<Self> {
        let a = rule.matrix(&reference.slot_weights(&group));
        Self::new(group, a, reference)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn a(&self) -> &RMat {
        &self.a
    }

    pub fn reference(&self) -> &BiInvariantLaplacian {
        &self.reference
    }

    /// `s · L` with the same reference.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.group.clone(), &self.a * s, self.reference.clone())
    }

    /// `p·self + q·other`; fails if the result is not PSD.
    pub fn combine(&self, p: f64, other: &SubLaplacianSpec, q: f64) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::Structural("operators live on different groups".into()));
        }
        Self::new(self.group.clone(), &self.a * p + &other.a * q, self.reference.clone())
    }

    /// The reference `Δ` scaled by `s`, as a sub-Laplacian.
    pub fn reference_operator(&self, s: f64) -> SubLaplacianSpec {
        SubLaplacianSpec::laplacian(self.group.clone(), self.reference.scaled(s))
    }

    fn structurally_bi_invariant(&self) -> bool {
        let g = &self.group;
        for (f, kind) in g.factors().iter().enumerate() {
            if *kind != FactorKind::SU2 {
                continue;
            }
            let r = g.slot_range(f);
            let d = self.a[(r.start, r.start)];
            for i in r.clone() {
                for j in 0..g.basis_len() {
                    let v = self.a[(i, j)];
                    let expected = if i == j {
                        d
                    } else {
                        0.0
                    };
                    if v != expected {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `‖Ad_gᵀ A Ad_g - A‖_F` at `g`.
    pub fn ad_residual(&self, g: &crate::group::GroupElement) -> Result<f64> {
        let ad = self.group.adjoint_matrix(g)?;
        Ok((ad.transpose() * &self.a * ad - &self.a).norm())
    }

    /// Ad-invariance of `A`: SU(2) blocks are multiples of the identity and do
    /// not couple to other slots; circle couplings are free. The structural
    /// answer is cross-checked against `Ad_g` residuals at seeded random `g`.
    pub fn is_bi_invariant(&self) -> bool {
        let structural = self.structurally_bi_invariant();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let scale = self.a.norm().max(1.0);
        let numeric = (0..8).all(|_| {
            let g = self.group.random_element(&mut rng);
            self.ad_residual(&g).map(|r| r <= 1e-10 * scale).unwrap_or(false)
        });
        structural && numeric
    }

    /// Extreme form ratios against the reference (no positivity requirement).
    pub fn form_bounds(&self) -> (f64, f64) {
        form_bounds(&self.a, &self.reference.slot_weights(&self.group))
    }

    /// `c, C` against the reference weights.
    pub fn comparability(&self, method: ComparabilityMethod) -> Result<ComparabilityCertificate> {
        comparability_constants(&self.a, &self.reference.slot_weights(&self.group), method)
    }

    /// `Λ_π`. Bi-invariant operators take the scalar path.
    pub fn dpi(&self, pi: &IrrepIndex) -> Result<Block> {
        self.group.check_irrep(pi)?;
        if self.structurally_bi_invariant() {
            return Ok(Block::Scalar(self.scalar_eigenvalue(pi)));
        }
        Ok(Block::Dense(self.dpi_dense(pi)?))
    }

    fn scalar_eigenvalue(&self, pi: &IrrepIndex) -> f64 {
        let g = &self.group;
        let mut circle = Vec::new();
        let mut acc = 0.0;
        for (f, kind) in g.factors().iter().enumerate() {
            let i = g.slot_range(f).start;
            match kind {
                FactorKind::Circle => circle.push((i, pi.labels[f] as f64)),
                FactorKind::SU2 => acc += self.a[(i, i)] * crate::group::su2::casimir(pi.labels[f]),
            }
        }
        for &(i, ni) in &circle {
            for &(j, nj) in &circle {
                acc += self.a[(i, j)] * ni * nj;
            }
        }
        acc
    }

    /// Dense `Λ_π`, computed as `-Σ_i G_i (Σ_j a_ij G_j)` and symmetrized.
    pub fn dpi_dense(&self, pi: &IrrepIndex) -> Result<CMat> {
        let n = self.group.basis_len();
        let d = self.group.irrep_dim(pi);
        let gens: Vec<CMat> = (0..n)
            .map(|i| self.group.generator_matrix(pi, i))
            .collect::<Result<_>>()?;
        let mut out = CMat::zeros(d, d);
        for i in 0..n {
            let mut h = CMat::zeros(d, d);
            let mut any = false;
            for (j, g) in gens.iter().enumerate() {
                let a = self.a[(i, j)];
                if a != 0.0 {
                    h += g * C64::new(a, 0.0);
                    any = true;
                }
            }
            if any {
                out -= &gens[i] * h;
            }
        }
        Ok((&out + out.adjoint()) * C64::new(0.5, 0.0))
    }

    /// True when `A` has no entries coupling different factors.
    pub fn is_factorized(&self) -> bool {
        let g = &self.group;
        for f in 0..g.num_factors() {
            for h in 0..g.num_factors() {
                if f == h {
                    continue;
                }
                for i in g.slot_range(f) {
                    for j in g.slot_range(h) {
                        if self.a[(i, j)] != 0.0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Restriction to a single factor.
    pub fn factor(&self, f: usize) -> SubLaplacianSpec {
        let kind = self.group.factors()[f];
        let group = GroupSpec::new(vec![kind]).expect("one factor");
        let r = self.group.slot_range(f);
        let a = self.a.view((r.start, r.start), (r.len(), r.len())).into_owned();
        SubLaplacianSpec {
            group,
            a,
            reference: BiInvariantLaplacian {
                weights: vec![self.reference.weights[f]],
            },
        }
    }
}

/// `ε|a_ii| > Σ_{j≠i} |a_ij|` on every row.
pub fn check_diag_dominant(a: &RMat, eps: f64) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Argument(format!("ε = {eps} must lie in (0, 1)")));
    }
    Ok((0..a.nrows()).all(|i| {
        let off: f64 = (0..a.ncols()).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        eps * a[(i, i)].abs() > off
    }))
}

/// Extreme generalized eigenvalues of `(A, diag(w))` without the positivity requirement.
pub fn form_bounds(a: &RMat, weights: &[f64]) -> (f64, f64) {
    let s: Vec<f64> = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let n = a.nrows();
    let m = RMat::from_fn(n, n, |i, j| a[(i, j)] * s[i] * s[j]);
    let ev = symmetric_eigenvalues(&m);
    (ev[0], ev[n - 1])
}

/// Generalized eigenvalue bounds of `(A, diag(w))`, exact or via Gershgorin discs
/// of `W^{-1/2} A W^{-1/2}`.
pub fn comparability_constants(
    a: &RMat,
    weights: &[f64],
    method: ComparabilityMethod,
) -> Result<ComparabilityCertificate> {
    let n = a.nrows();
    if a.ncols() != n || weights.len() != n {
        return Err(Error::Structural("matrix and weights sizes differ".into()));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Argument("weights must be positive".into()));
    }
    let s: Vec<f64> = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let m = RMat::from_fn(n, n, |i, j| {
        let v = if i <= j { a[(i, j)] } else { a[(j, i)] };
        v * s[i] * s[j]
    });
    let (c, big_c) = match method {
        ComparabilityMethod::Eigen => {
            let ev = symmetric_eigenvalues(&m);
            (ev[0], ev[n - 1])
        }
        ComparabilityMethod::Gershgorin => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..n {
                let r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
                lo = lo.min(m[(i, i)] - r);
                hi = hi.max(m[(i, i)] + r);
            }
            (lo, hi)
        }
    };
    if !(c > 0.0) {
        return Err(Error::NotComparable { c });
    }
    Ok(ComparabilityCertificate { c, big_c, method })
}

/// Basis change `Y_j = Σ_i T_j^i X_i` (row `j` of `t` holds the coefficients of `Y_j`).
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    pub t: RMat,
}

impl BasisChange {
    pub fn new(t: RMat) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::Structural("basis change must be square".into()));
        }
        Ok(BasisChange { t })
    }

    /// `TᵀT`, the coefficient matrix of `-Σ_j Y_j²` in the `X` basis.
    pub fn gram(&self) -> RMat {
        self.t.transpose() * &self.t
    }
}

/// Smallest and largest singular values of `T`, so `c‖ξ‖ ≤ ‖Tξ‖ ≤ C‖ξ‖`.
///
/// The quadratic-form version used for comparability is the square of these:
/// `c²‖ξ‖² ≤ ξᵀ(TᵀT)ξ ≤ C²‖ξ‖²`.
pub fn basis_change_bounds(t: &BasisChange) -> Result<(f64, f64)> {
    let sv = SVD::new(t.t.clone(), false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 1e-12 * max.max(1e-300)) {
        return Err(Error::Singular(min));
    }
    Ok((min, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::irrep_enumerate;
    use crate::linalg::HermitianEigen;

    fn m2(a: f64, b: f64, c: f64) -> RMat {
        RMat::from_row_slice(2, 2, &[a, b, b, c])
    }

    #[test]
    fn diag_dominance_examples() {
        let a = m2(1.0, 0.3, 1.0);
        assert!(check_diag_dominant(&a, 0.5).unwrap());
        assert!(!check_diag_dominant(&a, 0.2).unwrap());
        assert!(check_diag_dominant(&RMat::identity(3, 3), 0.01).unwrap());
        assert!(check_diag_dominant(&a, 1.0).is_err());
    }

    #[test]
    fn comparability_examples() {
        let e = ComparabilityMethod::Eigen;
        let c = comparability_constants(&RMat::identity(2, 2), &[1.0, 1.0], e).unwrap();
        assert_eq!((c.c, c.big_c), (1.0, 1.0));
        let c = comparability_constants(&m2(2.0, 0.0, 3.0), &[1.0, 1.0], e).unwrap();
        assert!((c.c - 2.0).abs() < 1e-14 && (c.big_c - 3.0).abs() < 1e-14);
        let c = comparability_constants(&m2(1.0, 0.3, 1.0), &[1.0, 1.0], e).unwrap();
        assert!((c.c - 0.7).abs() < 1e-14 && (c.big_c - 1.3).abs() < 1e-14);
        let g = comparability_constants(&m2(1.0, 0.3, 1.0), &[1.0, 1.0], ComparabilityMethod::Gershgorin).unwrap();
        assert!(g.c <= c.c + 1e-15 && g.big_c >= c.big_c - 1e-15);
        assert!(matches!(
            comparability_constants(&m2(1.0, 1.0, 1.0), &[1.0, 1.0], e),
            Err(Error::NotComparable { .. })
        ));
    }

    #[test]
    fn bi_invariance_examples() {
        let su2 = GroupSpec::su2();
        let r = BiInvariantLaplacian::unit(&su2);
        assert!(SubLaplacianSpec::laplacian(su2.clone(), r.clone()).is_bi_invariant());
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 2.0]));
        assert!(!SubLaplacianSpec::new(su2, a, r).unwrap().is_bi_invariant());
        let t2 = GroupSpec::torus(2).unwrap();
        let l = SubLaplacianSpec::new(t2.clone(), m2(1.0, 0.9, 1.0), BiInvariantLaplacian::unit(&t2)).unwrap();
        assert!(l.is_bi_invariant());
    }

    #[test]
    fn dpi_examples() {
        let c = GroupSpec::circle();
        let l = SubLaplacianSpec::new(c.clone(), RMat::from_element(1, 1, 2.5), BiInvariantLaplacian::unit(&c)).unwrap();
        assert_eq!(l.dpi(&IrrepIndex::new(vec![3])).unwrap(), Block::Scalar(22.5));

        let su2 = GroupSpec::su2();
        let d = SubLaplacianSpec::laplacian(su2.clone(), BiInvariantLaplacian::new(&su2, vec![0.7]).unwrap());
        for tj in 0..6 {
            let pi = IrrepIndex::new(vec![tj]);
            let dense = d.dpi_dense(&pi).unwrap();
            let target = 0.7 * crate::group::su2::casimir(tj);
            let resid = dense - CMat::identity(tj as usize + 1, tj as usize + 1) * C64::new(target, 0.0);
            assert!(crate::linalg::max_abs(&resid) < 1e-12);
        }
    }

    #[test]
    fn dense_blocks_dominate_scaled_casimir() {
        let su2 = GroupSpec::su2();
        let a = RMat::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.5, 0.1, 0.0, 0.1, 0.8]);
        let l = SubLaplacianSpec::new(su2.clone(), a, BiInvariantLaplacian::unit(&su2)).unwrap();
        let cert = l.comparability(ComparabilityMethod::Eigen).unwrap();
        for pi in irrep_enumerate(&su2, &[1.0], 30.0).unwrap() {
            let e = HermitianEigen::new(&l.dpi_dense(&pi).unwrap());
            let cas = su2.casimir(&pi, &[1.0]);
            assert!(e.min() >= cert.c * cas - 1e-8);
            assert!(e.max() <= cert.big_c * cas + 1e-8);
        }
    }

    #[test]
    fn basis_change_examples() {
        let i = BasisChange::new(RMat::identity(2, 2)).unwrap();
        assert_eq!(basis_change_bounds(&i).unwrap(), (1.0, 1.0));
        let two = BasisChange::new(RMat::identity(2, 2) * 2.0).unwrap();
        assert_eq!(basis_change_bounds(&two).unwrap(), (2.0, 2.0));
        let (s, c) = (0.4f64.sin(), 0.4f64.cos());
        let rot = RMat::from_row_slice(2, 2, &[c, -s, s, c]);
        let t = BasisChange::new(rot * RMat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 2.0])).unwrap();
        let (lo, hi) = basis_change_bounds(&t).unwrap();
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
        let sing = BasisChange::new(m2(1.0, 1.0, 1.0)).unwrap();
        assert!(matches!(basis_change_bounds(&sing), Err(Error::Singular(_))));
    }
}

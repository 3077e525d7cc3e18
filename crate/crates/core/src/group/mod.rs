//! Finite products of circles and SU(2): elements, irreducible representations,
//! Lie-algebra generators and Haar quadrature.

pub mod quadrature;
pub mod su2;

use std::fmt;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, CMat, RMat, C64};

pub use quadrature::{haar_quadrature, haar_quadrature_with, pair_resolution, quadrature_for_pairs, QuadratureRule};

const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    Circle,
    SU2,
}

impl FactorKind {
    /// Number of generator slots.
    pub fn slots(self) -> usize {
        match self {
            FactorKind::Circle => 1,
            FactorKind::SU2 => 3,
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::Circle => write!(f, "circle"),
            FactorKind::SU2 => write!(f, "su2"),
        }
    }
}

/// Position of a generator: `(factor, slot within the factor)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub factor: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Part {
    /// Angle in `[0, 2π)`.
    Circle(f64),
    SU2(UnitQuaternion<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub parts: Vec<Part>,
}

impl GroupElement {
    pub fn part(&self, factor: usize) -> &Part {
        &self.parts[factor]
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn quat(w: f64, x: f64, y: f64, z: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z))
}

/// Irreducible representation label: `n` for a circle factor, `2j` for SU(2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrrepIndex {
    pub labels: Vec<i32>,
}

impl IrrepIndex {
    pub fn new(labels: Vec<i32>) -> Self {
        IrrepIndex { labels }
    }

    pub fn is_trivial(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }
}

impl fmt::Display for IrrepIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Ordered list of compact factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<FactorKind>,
    offsets: Vec<usize>,
    len: usize,
}

impl GroupSpec {
    pub fn new(factors: Vec<FactorKind>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Structural("group needs at least one factor".into()));
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut len = 0;
        for f in &factors {
            offsets.push(len);
            len += f.slots();
        }
        Ok(GroupSpec {
            factors,
            offsets,
            len,
        })
    }

    pub fn circle() -> Self {
        Self::new(vec![FactorKind::Circle]).unwrap()
    }

    pub fn su2() -> Self {
        Self::new(vec![FactorKind::SU2]).unwrap()
    }

    pub fn torus(d: usize) -> Result<Self> {
        Self::new(vec![FactorKind::Circle; d])
    }

    pub fn factors(&self) -> &[FactorKind] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Size of the generator basis (1 per circle, 3 per SU(2)).
    pub fn basis_len(&self) -> usize {
        self.len
    }

    pub fn basis_index(&self) -> Vec<BasisIndex> {
        self.factors
            .iter()
            .enumerate()
            .flat_map(|(factor, k)| (0..k.slots()).map(move |slot| BasisIndex { factor, slot }))
            .collect()
    }

    pub fn locate(&self, i: usize) -> Result<BasisIndex> {
        if i >= self.len {
            return Err(Error::Structural(format!(
                "basis index {i} out of range 0..{}",
                self.len
            )));
        }
        let factor = self.offsets.partition_point(|&o| o <= i) - 1;
        Ok(BasisIndex {
            factor,
            slot: i - self.offsets[factor],
        })
    }

    pub fn slot_range(&self, factor: usize) -> std::ops::Range<usize> {
        let o = self.offsets[factor];
        o..o + self.factors[factor].slots()
    }

    pub fn is_abelian(&self) -> bool {
        self.factors.iter().all(|&f| f == FactorKind::Circle)
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if x.parts.len() != self.factors.len() {
            return Err(Error::Structural(format!(
                "element has {} factors, group has {}",
                x.parts.len(),
                self.factors.len()
            )));
        }
        for (k, (p, f)) in x.parts.iter().zip(&self.factors).enumerate() {
            let ok = matches!(
                (p, f),
                (Part::Circle(_), FactorKind::Circle) | (Part::SU2(_), FactorKind::SU2)
            );
            if !ok {
                return Err(Error::Structural(format!("factor {k} is not a {f}")));
            }
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            parts: self
                .factors
                .iter()
                .map(|f| match f {
                    FactorKind::Circle => Part::Circle(0.0),
                    FactorKind::SU2 => Part::SU2(UnitQuaternion::identity()),
                })
                .collect(),
        }
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        let parts = x
            .parts
            .iter()
            .zip(&y.parts)
            .map(|(a, b)| match (a, b) {
                (Part::Circle(s), Part::Circle(t)) => Part::Circle(wrap_angle(s + t)),
                (Part::SU2(p), Part::SU2(q)) => {
                    let mut r = p * q;
                    r.renormalize();
                    Part::SU2(r)
                }
                _ => unreachable!("checked above"),
            })
            .collect();
        Ok(GroupElement { parts })
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        let parts = x
            .parts
            .iter()
            .map(|a| match a {
                Part::Circle(s) => Part::Circle(wrap_angle(-s)),
                Part::SU2(p) => Part::SU2(p.inverse()),
            })
            .collect();
        Ok(GroupElement { parts })
    }

    /// `g x g⁻¹`.
    pub fn conjugate(&self, g: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        let gx = self.multiply(g, x)?;
        self.multiply(&gx, &self.inverse(g)?)
    }

    /// `exp(s X_i)`.
    pub fn exp_dir(&self, i: usize, s: f64) -> Result<GroupElement> {
        if !s.is_finite() {
            return Err(Error::Argument(format!("exp_dir parameter {s} is not finite")));
        }
        let b = self.locate(i)?;
        let mut e = self.identity();
        e.parts[b.factor] = match self.factors[b.factor] {
            FactorKind::Circle => Part::Circle(wrap_angle(s)),
            FactorKind::SU2 => {
                let mut v = [0.0; 3];
                v[b.slot] = (0.5 * s).sin();
                Part::SU2(quat((0.5 * s).cos(), v[0], v[1], v[2]))
            }
        };
        Ok(e)
    }

    /// `exp(Σ_i ξ_i X_i)` factorwise.
    pub fn exp_vec(&self, xi: &[f64]) -> Result<GroupElement> {
        if xi.len() != self.len {
            return Err(Error::Structural("coordinate vector length".into()));
        }
        let parts = self
            .factors
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let r = self.slot_range(k);
                match f {
                    FactorKind::Circle => Part::Circle(wrap_angle(xi[r.start])),
                    FactorKind::SU2 => {
                        let v = Vector3::new(xi[r.start], xi[r.start + 1], xi[r.start + 2]);
                        let phi = v.norm();
                        if phi == 0.0 {
                            Part::SU2(UnitQuaternion::identity())
                        } else {
                            let a = v * ((0.5 * phi).sin() / phi);
                            Part::SU2(quat((0.5 * phi).cos(), a.x, a.y, a.z))
                        }
                    }
                }
            })
            .collect();
        Ok(GroupElement { parts })
    }

    /// Haar-random element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let parts = self
            .factors
            .iter()
            .map(|f| match f {
                FactorKind::Circle => Part::Circle(wrap_angle(rng.random::<f64>() * TAU)),
                FactorKind::SU2 => {
                    let c: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
                    Part::SU2(quat(c[0], c[1], c[2], c[3]))
                }
            })
            .collect();
        GroupElement { parts }
    }

    /// Matrix of `Ad_g` on the generator basis: identity on circle slots, the
    /// rotation of `g` on each SU(2) block.
    pub fn adjoint_matrix(&self, g: &GroupElement) -> Result<RMat> {
        self.check(g)?;
        let mut m = RMat::identity(self.len, self.len);
        for (k, p) in g.parts.iter().enumerate() {
            if let Part::SU2(q) = p {
                let r = q.to_rotation_matrix();
                let o = self.offsets[k];
                for a in 0..3 {
                    for b in 0..3 {
                        m[(o + a, o + b)] = r[(a, b)];
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn trivial_irrep(&self) -> IrrepIndex {
        IrrepIndex::new(vec![0; self.factors.len()])
    }

    pub fn check_irrep(&self, pi: &IrrepIndex) -> Result<()> {
        if pi.labels.len() != self.factors.len() {
            return Err(Error::Structural(format!(
                "irrep {pi} has {} labels, group has {} factors",
                pi.labels.len(),
                self.factors.len()
            )));
        }
        for (l, f) in pi.labels.iter().zip(&self.factors) {
            if *f == FactorKind::SU2 && *l < 0 {
                return Err(Error::Structural(format!("negative spin label in {pi}")));
            }
        }
        Ok(())
    }

    pub fn irrep_dim(&self, pi: &IrrepIndex) -> usize {
        pi.labels
            .iter()
            .zip(&self.factors)
            .map(|(&l, f)| match f {
                FactorKind::Circle => 1,
                FactorKind::SU2 => su2::dim(l),
            })
            .product()
    }

    /// Per-factor Casimir values `n²` or `j(j+1)`.
    pub fn factor_casimirs(&self, pi: &IrrepIndex) -> Vec<f64> {
        pi.labels
            .iter()
            .zip(&self.factors)
            .map(|(&l, f)| factor_casimir(*f, l))
            .collect()
    }

    /// `Σ_f w_f · cas_f(π)`.
    pub fn casimir(&self, pi: &IrrepIndex, weights: &[f64]) -> f64 {
        pi.labels
            .iter()
            .zip(&self.factors)
            .zip(weights)
            .map(|((&l, f), w)| w * factor_casimir(*f, l))
            .sum()
    }

    pub fn factor_rep(&self, factor: usize, label: i32, x: &GroupElement) -> CMat {
        match &x.parts[factor] {
            Part::Circle(theta) => CMat::from_element(1, 1, C64::from_polar(1.0, label as f64 * theta)),
            Part::SU2(q) => su2::rep(label, q),
        }
    }

    /// Character of a single factor.
    pub fn factor_character(&self, factor: usize, label: i32, x: &GroupElement) -> C64 {
        match &x.parts[factor] {
            Part::Circle(theta) => C64::from_polar(1.0, label as f64 * theta),
            Part::SU2(q) => C64::new(su2::character(label, q), 0.0),
        }
    }

    pub fn character(&self, pi: &IrrepIndex, x: &GroupElement) -> C64 {
        pi.labels
            .iter()
            .enumerate()
            .map(|(k, &l)| self.factor_character(k, l, x))
            .fold(C64::new(1.0, 0.0), |a, b| a * b)
    }

    /// `π(x)`, the Kronecker product of the factor representations (factor 0 outermost).
    pub fn rep_matrix(&self, pi: &IrrepIndex, x: &GroupElement) -> Result<CMat> {
        self.check(x)?;
        self.check_irrep(pi)?;
        let mut acc = CMat::identity(1, 1);
        for (k, &l) in pi.labels.iter().enumerate() {
            let m = self.factor_rep(k, l, x);
            acc = if acc.nrows() == 1 { m * acc[(0, 0)] } else { kron(&acc, &m) };
        }
        Ok(acc)
    }

    /// `dπ(X_i)` on the full tensor product.
    pub fn generator_matrix(&self, pi: &IrrepIndex, i: usize) -> Result<CMat> {
        self.check_irrep(pi)?;
        let b = self.locate(i)?;
        let mut acc = CMat::identity(1, 1);
        for (k, (&l, f)) in pi.labels.iter().zip(&self.factors).enumerate() {
            let m = if k == b.factor {
                factor_generator(*f, l, b.slot)
            } else {
                let d = match f {
                    FactorKind::Circle => 1,
                    FactorKind::SU2 => su2::dim(l),
                };
                CMat::identity(d, d)
            };
            acc = kron(&acc, &m);
        }
        Ok(acc)
    }
}

pub fn factor_casimir(kind: FactorKind, label: i32) -> f64 {
    match kind {
        FactorKind::Circle => (label as f64) * (label as f64),
        FactorKind::SU2 => su2::casimir(label),
    }
}

pub fn factor_dim(kind: FactorKind, label: i32) -> usize {
    match kind {
        FactorKind::Circle => 1,
        FactorKind::SU2 => su2::dim(label),
    }
}

/// Generator of one factor in its own irrep.
pub fn factor_generator(kind: FactorKind, label: i32, slot: usize) -> CMat {
    match kind {
        FactorKind::Circle => CMat::from_element(1, 1, C64::new(0.0, label as f64)),
        FactorKind::SU2 => su2::generator(label, slot),
    }
}

/// All irreps with `Σ_f w_f cas_f ≤ cutoff`, sorted by Casimir value and then
/// lexicographically by label.
pub fn irrep_enumerate(spec: &GroupSpec, weights: &[f64], cutoff: f64) -> Result<Vec<IrrepIndex>> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::Argument(format!("casimir cutoff {cutoff} must be positive")));
    }
    let mut out: Vec<(f64, IrrepIndex)> = Vec::new();
    for_each_irrep(spec, weights, cutoff, |labels, _| {
        let pi = IrrepIndex::new(labels.to_vec());
        // recompute in canonical order so ties compare exactly
        out.push((spec.casimir(&pi, weights), pi));
    })?;
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out.into_iter().map(|(_, p)| p).collect())
}

/// Visits every label tuple with weighted Casimir `≤ cutoff` (unsorted).
pub fn for_each_irrep<F: FnMut(&[i32], f64)>(
    spec: &GroupSpec,
    weights: &[f64],
    cutoff: f64,
    mut visit: F,
) -> Result<()> {
    if weights.len() != spec.num_factors() {
        return Err(Error::Structural(format!(
            "{} weights for {} factors",
            weights.len(),
            spec.num_factors()
        )));
    }
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::Argument("weights must be positive".into()));
    }
    if cutoff < 0.0 {
        return Ok(());
    }
    let mut labels = vec![0i32; spec.num_factors()];
    enumerate_rec(spec.factors(), weights, cutoff, 0, 0.0, &mut labels, &mut visit);
    Ok(())
}

fn enumerate_rec<F: FnMut(&[i32], f64)>(
    factors: &[FactorKind],
    weights: &[f64],
    cutoff: f64,
    k: usize,
    acc: f64,
    labels: &mut Vec<i32>,
    visit: &mut F,
) {
    if k == labels.len() {
        visit(labels, acc);
        return;
    }
    let w = weights[k];
    match factors[k] {
        FactorKind::Circle => {
            let nmax = ((cutoff - acc) / w).max(0.0).sqrt().floor() as i32 + 1;
            for n in -nmax..=nmax {
                let c = acc + w * (n as f64) * (n as f64);
                if c <= cutoff {
                    labels[k] = n;
                    enumerate_rec(factors, weights, cutoff, k + 1, c, labels, visit);
                }
            }
        }
        FactorKind::SU2 => {
            let mut tj = 0;
            loop {
                let c = acc + w * su2::casimir(tj);
                if c > cutoff {
                    break;
                }
                labels[k] = tj;
                enumerate_rec(factors, weights, cutoff, k + 1, c, labels, visit);
                tj += 1;
            }
        }
    }
    labels[k] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn mixed() -> GroupSpec {
        GroupSpec::new(vec![FactorKind::Circle, FactorKind::SU2]).unwrap()
    }

    #[test]
    fn circle_angles_add() {
        let g = GroupSpec::circle();
        let x = GroupElement { parts: vec![Part::Circle(PI / 2.0)] };
        let y = GroupElement { parts: vec![Part::Circle(PI)] };
        match g.multiply(&x, &y).unwrap().parts[0] {
            Part::Circle(t) => assert!((t - 1.5 * PI).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn quaternion_units_multiply() {
        let g = GroupSpec::su2();
        let i = GroupElement { parts: vec![Part::SU2(quat(0.0, 1.0, 0.0, 0.0))] };
        let j = GroupElement { parts: vec![Part::SU2(quat(0.0, 0.0, 1.0, 0.0))] };
        let k = g.multiply(&i, &j).unwrap();
        match &k.parts[0] {
            Part::SU2(q) => assert!((q.quaternion() - Quaternion::new(0.0, 0.0, 0.0, 1.0)).norm() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn exp_dir_is_one_parameter_subgroup() {
        let g = mixed();
        for i in 0..g.basis_len() {
            let a = g.exp_dir(i, 0.7).unwrap();
            let b = g.exp_dir(i, 1.9).unwrap();
            let ab = g.multiply(&a, &b).unwrap();
            let c = g.exp_dir(i, 2.6).unwrap();
            let pi = IrrepIndex::new(vec![1, 2]);
            let d = g.rep_matrix(&pi, &ab).unwrap() - g.rep_matrix(&pi, &c).unwrap();
            assert!(frobenius(&d) < 1e-13);
        }
        assert_eq!(g.exp_dir(2, 0.0).unwrap(), g.identity());
    }

    #[test]
    fn mismatched_spec_is_structural_error() {
        let g = mixed();
        let x = GroupSpec::circle().identity();
        assert!(matches!(g.multiply(&x, &x), Err(Error::Structural(_))));
    }

    #[test]
    fn generators_are_derivatives_of_reps() {
        let g = mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = g.random_element(&mut rng);
        let pi = IrrepIndex::new(vec![-2, 3]);
        let h = 1e-4;
        for i in 0..g.basis_len() {
            let xp = g.multiply(&x, &g.exp_dir(i, h).unwrap()).unwrap();
            let xm = g.multiply(&x, &g.exp_dir(i, -h).unwrap()).unwrap();
            let fd = (g.rep_matrix(&pi, &xp).unwrap() - g.rep_matrix(&pi, &xm).unwrap())
                / C64::new(2.0 * h, 0.0);
            let exact = g.rep_matrix(&pi, &x).unwrap() * g.generator_matrix(&pi, i).unwrap();
            assert!(frobenius(&(fd - exact)) < 1e-6);
        }
    }

    #[test]
    fn enumerate_examples() {
        let c = irrep_enumerate(&GroupSpec::circle(), &[1.0], 9.0).unwrap();
        let mut ns: Vec<i32> = c.iter().map(|p| p.labels[0]).collect();
        ns.sort();
        assert_eq!(ns, (-3..=3).collect::<Vec<_>>());
        assert_eq!(c[0].labels, vec![0]);
        assert_eq!(c[1].labels, vec![-1]);

        let s = irrep_enumerate(&GroupSpec::su2(), &[1.0], 6.0).unwrap();
        let tj: Vec<i32> = s.iter().map(|p| p.labels[0]).collect();
        assert_eq!(tj, vec![0, 1, 2, 3, 4]);

        let m = irrep_enumerate(&mixed(), &[1.0, 1.0], 4.0).unwrap();
        for p in &m {
            assert!(mixed().casimir(p, &[1.0, 1.0]) <= 4.0);
        }
        assert!(m.contains(&IrrepIndex::new(vec![1, 2])));
        assert!(!m.contains(&IrrepIndex::new(vec![2, 1])));
    }

    #[test]
    fn adjoint_matrix_rotates_generators() {
        let g = GroupSpec::su2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = g.random_element(&mut rng);
        let ad = g.adjoint_matrix(&q).unwrap();
        let pi = IrrepIndex::new(vec![2]);
        let rq = g.rep_matrix(&pi, &q).unwrap();
        for a in 0..3 {
            let lhs = &rq * g.generator_matrix(&pi, a).unwrap() * rq.adjoint();
            let mut rhs = CMat::zeros(3, 3);
            for b in 0..3 {
                rhs += g.generator_matrix(&pi, b).unwrap() * C64::new(ad[(b, a)], 0.0);
            }
            assert!(frobenius(&(lhs - rhs)) < 1e-12);
        }
    }
}

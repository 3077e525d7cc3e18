//! Band-limited functions stored by their Fourier coefficients.
//!
//! `f(x) = Σ_π d_π tr(F_π π(x))` with `F_π = ∫ f(y) π(y)† dν(y)`. In this
//! convention a left-invariant field acts by `(Xf)^ = dπ(X) F`, and the group
//! convolution `(f*g)(x) = ∫ f(y) g(y⁻¹x) dν(y)` has coefficients `ĝ · f̂`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{su2, GroupElement, GroupSpec, IrrepIndex, Part, QuadratureRule};
use crate::linalg::{frobenius, kron, CMat, KahanComplex, C64};

/// Scale of floating-point error attributed to each spectral sum.
pub const ROUNDOFF_FACTOR: f64 = 256.0 * f64::EPSILON;

/// A per-irrep coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    /// `c · I`.
    Scalar(C64),
    Dense(CMat),
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Scalar(C64::new(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Coeff::Scalar(C64::new(1.0, 0.0))
    }

    pub fn to_matrix(&self, d: usize) -> CMat {
        match self {
            Coeff::Scalar(c) => CMat::identity(d, d) * *c,
            Coeff::Dense(m) => m.clone(),
        }
    }

    /// `self · other`.
    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Scalar(a), Coeff::Scalar(b)) => Coeff::Scalar(a * b),
            (Coeff::Scalar(a), Coeff::Dense(m)) | (Coeff::Dense(m), Coeff::Scalar(a)) => {
                Coeff::Dense(m * *a)
            }
            (Coeff::Dense(a), Coeff::Dense(b)) => Coeff::Dense(a * b),
        }
    }

    pub fn scale(&self, s: C64) -> Coeff {
        match self {
            Coeff::Scalar(a) => Coeff::Scalar(a * s),
            Coeff::Dense(m) => Coeff::Dense(m * s),
        }
    }

    pub fn add(&self, other: &Coeff, d: usize) -> Coeff {
        match (self, other) {
            (Coeff::Scalar(a), Coeff::Scalar(b)) => Coeff::Scalar(a + b),
            _ => Coeff::Dense(self.to_matrix(d) + other.to_matrix(d)),
        }
    }

    pub fn frobenius(&self, d: usize) -> f64 {
        match self {
            Coeff::Scalar(a) => a.norm() * (d as f64).sqrt(),
            Coeff::Dense(m) => frobenius(m),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Scalar(a) => *a == C64::new(0.0, 0.0),
            Coeff::Dense(m) => m.iter().all(|z| *z == C64::new(0.0, 0.0)),
        }
    }
}

/// Characters and representation matrices of every factor at one point.
#[derive(Debug, Clone)]
pub struct RepTable {
    chars: Vec<HashMap<i32, C64>>,
    reps: Vec<HashMap<i32, CMat>>,
}

impl RepTable {
    /// Precomputes characters for all labels in `irreps`, and matrices for the
    /// labels of irreps with `dense[k] == true`.
    pub fn new(group: &GroupSpec, irreps: &[IrrepIndex], dense: &[bool], x: &GroupElement) -> Self {
        let nf = group.num_factors();
        let mut chars: Vec<HashMap<i32, C64>> = vec![HashMap::new(); nf];
        let mut need: Vec<Vec<i32>> = vec![Vec::new(); nf];
        for (pi, &dn) in irreps.iter().zip(dense) {
            for (f, &l) in pi.labels.iter().enumerate() {
                chars[f]
                    .entry(l)
                    .or_insert_with(|| group.factor_character(f, l, x));
                if dn {
                    need[f].push(l);
                }
            }
        }
        let reps = need
            .into_iter()
            .enumerate()
            .map(|(f, mut labels)| {
                labels.sort_unstable();
                labels.dedup();
                match (&x.parts[f], labels.last()) {
                    (Part::SU2(q), Some(&max)) => {
                        let ladder = su2::rep_ladder(max, q);
                        labels.iter().map(|&l| (l, ladder[l as usize].clone())).collect()
                    }
                    _ => labels.iter().map(|&l| (l, group.factor_rep(f, l, x))).collect(),
                }
            })
            .collect();
        RepTable { chars, reps }
    }

    pub fn character(&self, pi: &IrrepIndex) -> C64 {
        pi.labels
            .iter()
            .enumerate()
            .map(|(f, l)| self.chars[f][l])
            .fold(C64::new(1.0, 0.0), |a, b| a * b)
    }

    pub fn matrix(&self, pi: &IrrepIndex) -> CMat {
        let mut acc: Option<CMat> = None;
        for (f, l) in pi.labels.iter().enumerate() {
            let m = &self.reps[f][l];
            acc = Some(match acc {
                None => m.clone(),
                Some(a) => kron(&a, m),
            });
        }
        acc.unwrap_or_else(|| CMat::identity(1, 1))
    }

    /// `tr(C π(x))`.
    pub fn trace(&self, pi: &IrrepIndex, c: &Coeff) -> C64 {
        match c {
            Coeff::Scalar(a) => a * self.character(pi),
            Coeff::Dense(m) if m.nrows() == 1 => m[(0, 0)] * self.character(pi),
            Coeff::Dense(m) => {
                if pi.labels.len() == 1 {
                    crate::linalg::trace_product(m, &self.reps[0][&pi.labels[0]])
                } else {
                    crate::linalg::trace_product(m, &self.matrix(pi))
                }
            }
        }
    }
}

/// Band-limited function with a sup-norm bound on the omitted spectral tail.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    pub group: GroupSpec,
    pub irreps: Arc<Vec<IrrepIndex>>,
    pub coeffs: Vec<Coeff>,
    /// Sup-norm bound on everything outside `irreps`.
    pub truncation: f64,
}

/// A point value with its accumulated error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: C64,
    /// Truncation plus roundoff estimate.
    pub abs_error: f64,
}

impl SpectralFunction {
    pub fn new(group: GroupSpec, irreps: Arc<Vec<IrrepIndex>>, coeffs: Vec<Coeff>, truncation: f64) -> Result<Self> {
        if irreps.len() != coeffs.len() {
            return Err(Error::Structural("one coefficient per irrep required".into()));
        }
        Ok(SpectralFunction {
            group,
            irreps,
            coeffs,
            truncation,
        })
    }

    pub fn zero(group: GroupSpec, irreps: Arc<Vec<IrrepIndex>>) -> Self {
        let coeffs = vec![Coeff::zero(); irreps.len()];
        SpectralFunction {
            group,
            irreps,
            coeffs,
            truncation: 0.0,
        }
    }

    /// A function with a single nonzero coefficient.
    pub fn single(group: GroupSpec, irreps: Arc<Vec<IrrepIndex>>, index: usize, coeff: Coeff) -> Self {
        let mut f = Self::zero(group, irreps);
        f.coeffs[index] = coeff;
        f
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|p| self.group.irrep_dim(p)).collect()
    }

    pub fn dense_mask(&self) -> Vec<bool> {
        self.coeffs.iter().map(|c| matches!(c, Coeff::Dense(_))).collect()
    }

    pub fn rep_table(&self, x: &GroupElement) -> RepTable {
        RepTable::new(&self.group, &self.irreps, &self.dense_mask(), x)
    }

    /// `ROUNDOFF_FACTOR · Σ d^{3/2} ‖F_π‖_F`.
    pub fn roundoff_scale(&self) -> f64 {
        self.irreps
            .iter()
            .zip(&self.coeffs)
            .map(|(p, c)| {
                let d = self.group.irrep_dim(p);
                (d as f64).powf(1.5) * c.frobenius(d)
            })
            .sum::<f64>()
            * ROUNDOFF_FACTOR
    }

    /// Value from a precomputed table; the table must cover this function's dense irreps.
    pub fn eval_with(&self, table: &RepTable) -> C64 {
        let mut acc = KahanComplex::default();
        for (p, c) in self.irreps.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let d = self.group.irrep_dim(p) as f64;
            acc.add(table.trace(p, c) * d);
        }
        acc.value()
    }

    pub fn eval(&self, x: &GroupElement) -> Result<Evaluated> {
        self.group.check(x)?;
        let value = self.eval_with(&self.rep_table(x));
        Ok(Evaluated {
            value,
            abs_error: self.truncation + self.roundoff_scale(),
        })
    }

    /// Real part at many points, in input order.
    pub fn eval_real_many(&self, xs: &[GroupElement]) -> Vec<f64> {
        crate::exec::map(xs, |x| self.eval_with(&self.rep_table(x)).re)
    }

    fn same_basis(&self, other: &SpectralFunction) -> Result<()> {
        if self.group != other.group || self.irreps != other.irreps {
            return Err(Error::Structural(
                "spectral functions use different irreducible bases".into(),
            ));
        }
        Ok(())
    }

    /// `self * other` (coefficients `other · self`).
    pub fn convolve(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        self.same_basis(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(f, g)| g.mul(f))
            .collect();
        Ok(SpectralFunction {
            group: self.group.clone(),
            irreps: Arc::clone(&self.irreps),
            coeffs,
            truncation: self.truncation + other.truncation,
        })
    }

    /// `p·self + q·other`.
    pub fn combine(&self, p: f64, other: &SpectralFunction, q: f64) -> Result<SpectralFunction> {
        self.same_basis(other)?;
        let coeffs = self
            .irreps
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .map(|(pi, (a, b))| {
                let d = self.group.irrep_dim(pi);
                a.scale(C64::new(p, 0.0)).add(&b.scale(C64::new(q, 0.0)), d)
            })
            .collect();
        Ok(SpectralFunction {
            group: self.group.clone(),
            irreps: Arc::clone(&self.irreps),
            coeffs,
            truncation: p.abs() * self.truncation + q.abs() * other.truncation,
        })
    }

    /// Left-multiplies every coefficient by `ops[π]`.
    pub fn apply(&self, ops: &[Coeff], gain: f64) -> Result<SpectralFunction> {
        if ops.len() != self.coeffs.len() {
            return Err(Error::Structural("operator blocks do not match".into()));
        }
        Ok(SpectralFunction {
            group: self.group.clone(),
            irreps: Arc::clone(&self.irreps),
            coeffs: ops.iter().zip(&self.coeffs).map(|(o, c)| o.mul(c)).collect(),
            truncation: self.truncation * gain,
        })
    }

    /// `∫ f dν`, the coefficient of the trivial irrep.
    pub fn integral(&self) -> C64 {
        self.irreps
            .iter()
            .zip(&self.coeffs)
            .find(|(p, _)| p.is_trivial())
            .map(|(_, c)| match c {
                Coeff::Scalar(a) => *a,
                Coeff::Dense(m) => m[(0, 0)],
            })
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Fourier coefficients of sampled values, `F_π = Σ_k w_k f(y_k) π(y_k)†`.
    ///
    /// Exact for band-limited data inside `irreps` when the rule integrates all
    /// pairwise coefficient products; checked up front.
    pub fn project(
        group: &GroupSpec,
        irreps: Arc<Vec<IrrepIndex>>,
        rule: &QuadratureRule,
        values: &[f64],
    ) -> Result<SpectralFunction> {
        if values.len() != rule.len() {
            return Err(Error::Structural("one sample per quadrature node required".into()));
        }
        rule.check_pairs(group, &irreps)?;
        let dense = vec![true; irreps.len()];
        let partial: Vec<Vec<CMat>> = crate::exec::map_range(rule.len(), |k| {
            let t = RepTable::new(group, &irreps, &dense, &rule.nodes[k]);
            let s = C64::new(rule.weights[k] * values[k], 0.0);
            irreps.iter().map(|p| t.matrix(p).adjoint() * s).collect()
        });
        let mut coeffs: Vec<CMat> = irreps
            .iter()
            .map(|p| {
                let d = group.irrep_dim(p);
                CMat::zeros(d, d)
            })
            .collect();
        for part in partial {
            for (c, m) in coeffs.iter_mut().zip(part) {
                *c += m;
            }
        }
        Ok(SpectralFunction {
            group: group.clone(),
            irreps,
            coeffs: coeffs.into_iter().map(Coeff::Dense).collect(),
            truncation: 0.0,
        })
    }
}

/// `∫ f(x y⁻¹) g(y) dν(y)` by quadrature.
pub fn quadrature_convolve<F, G>(group: &GroupSpec, rule: &QuadratureRule, f: F, g: G, x: &GroupElement) -> Result<f64>
where
    F: Fn(&GroupElement) -> f64 + Sync + Send,
    G: Fn(&GroupElement) -> f64 + Sync + Send,
{
    let vals: Vec<Result<f64>> = crate::exec::map(&rule.nodes, |y| {
        let xy = group.multiply(x, &group.inverse(y)?)?;
        Ok(f(&xy) * g(y))
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(rule.integrate_values(&vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{haar_quadrature, irrep_enumerate, FactorKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_recovers_coefficients() {
        let g = GroupSpec::new(vec![FactorKind::Circle, FactorKind::SU2]).unwrap();
        let irreps = Arc::new(irrep_enumerate(&g, &[1.0, 1.0], 3.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coeffs: Vec<Coeff> = irreps
            .iter()
            .map(|p| {
                let d = g.irrep_dim(p);
                Coeff::Dense(CMat::from_fn(d, d, |_, _| {
                    C64::new(rand::Rng::random::<f64>(&mut rng) - 0.5, rand::Rng::random::<f64>(&mut rng) - 0.5)
                }))
            })
            .collect();
        let f = SpectralFunction::new(g.clone(), Arc::clone(&irreps), coeffs, 0.0).unwrap();
        let rule = crate::group::quadrature::quadrature_for_pairs(&g, &irreps).unwrap();
        // the real part has coefficients (F_π + conj-rep terms); project the complex parts separately
        let re: Vec<f64> = rule.nodes.iter().map(|x| f.eval(x).unwrap().value.re).collect();
        let im: Vec<f64> = rule.nodes.iter().map(|x| f.eval(x).unwrap().value.im).collect();
        let pr = SpectralFunction::project(&g, Arc::clone(&irreps), &rule, &re).unwrap();
        let pi_ = SpectralFunction::project(&g, Arc::clone(&irreps), &rule, &im).unwrap();
        for (k, p) in irreps.iter().enumerate() {
            let d = g.irrep_dim(p);
            let rec = pr.coeffs[k].to_matrix(d) + pi_.coeffs[k].to_matrix(d) * C64::new(0.0, 1.0);
            assert!(frobenius(&(rec - f.coeffs[k].to_matrix(d))) < 1e-12);
        }
        assert!(haar_quadrature(&g, 1).unwrap().check_pairs(&g, &irreps).is_err());
    }
}

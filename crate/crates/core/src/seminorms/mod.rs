//! Derivative seminorms `|D^k f|`, `P^{l,λ}`, `M^N_L`, `M^{N,p}_{Δ,L}` and the
//! `l²` Minkowski bound for vector convolutions.
//!
//! Suprema over `G` are maxima over configured sample grids; reports carry the
//! argmax so grids can be refined where it matters.
//!
//! Frames: `M^N_L` and `|D^k f|_L` differentiate along a frame with
//! `L = -Σ Y_r²` (rows of `sqrt(A)`), while the mixed norm differentiates along
//! the frame of the reference `Δ` and interleaves powers of `L`.

pub mod chain;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, IrrepIndex, QuadratureRule};
use crate::heatkernel::SpectralKernel;
use crate::linalg::C64;
use crate::operators::{Block, SubLaplacianSpec};
use crate::spectral::{Coeff, SpectralFunction};

pub use chain::{l2_norm, p_word, ChainEngine, Frame, Op};

/// `(λ_0, ..., λ_k)` with non-negative entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LambdaComposition {
    pub entries: Vec<u32>,
}

impl LambdaComposition {
    pub fn k(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn weight(&self) -> u32 {
        self.entries.iter().sum()
    }
}

/// All `(k+1)`-tuples of non-negative integers summing to `m`.
///
/// Ordered by shape first (the entries sorted in decreasing order, compared
/// in decreasing lexicographic order) and then by the tuple itself in
/// decreasing lexicographic order, e.g. `Λ(2,2)` is
/// `(2,0,0) (0,2,0) (0,0,2) (1,1,0) (1,0,1) (0,1,1)`.
pub fn lambda_enumerate(k: usize, m: u32) -> Vec<LambdaComposition> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k + 1];
    compositions(0, m, &mut cur, &mut out);
    let shape = |v: &Vec<u32>| {
        let mut s = v.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    };
    out.sort_by(|a, b| shape(b).cmp(&shape(a)).then_with(|| b.cmp(a)));
    out.into_iter().map(|entries| LambdaComposition { entries }).collect()
}

fn compositions(i: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i + 1 == cur.len() {
        cur[i] = rest;
        out.push(cur.clone());
        return;
    }
    for v in 0..=rest {
        cur[i] = v;
        compositions(i + 1, rest - v, cur, out);
    }
}

/// A function of `(t, x)` known through its Fourier coefficients at each time.
pub trait SpectralField: Sync {
    fn group(&self) -> &GroupSpec;
    fn irreps(&self) -> Arc<Vec<IrrepIndex>>;
    /// `∂_t^a f(t, ·)`.
    fn at(&self, t: f64, a: u32) -> Result<SpectralFunction>;
    /// Sup-norm bound on the omitted coefficients of `∂_t^a f(t, ·)` after a
    /// chain of Casimir degree `q` with unit gain.
    fn tail(&self, t: f64, a: u32, q: f64) -> Result<f64>;
}

impl SpectralField for SpectralKernel {
    fn group(&self) -> &GroupSpec {
        self.spec().group()
    }

    fn irreps(&self) -> Arc<Vec<IrrepIndex>> {
        Arc::clone(SpectralKernel::irreps(self))
    }

    fn at(&self, t: f64, a: u32) -> Result<SpectralFunction> {
        self.derivative_at(t, a)
    }

    fn tail(&self, t: f64, a: u32, q: f64) -> Result<f64> {
        Ok(self.certificate().big_c.powi(a as i32) * self.tail_bound(t, q + a as f64)?)
    }
}

/// A time-independent function; its time derivatives vanish.
impl SpectralField for SpectralFunction {
    fn group(&self) -> &GroupSpec {
        &self.group
    }

    fn irreps(&self) -> Arc<Vec<IrrepIndex>> {
        Arc::clone(&self.irreps)
    }

    fn at(&self, _t: f64, a: u32) -> Result<SpectralFunction> {
        if a == 0 {
            Ok(self.clone())
        } else {
            Ok(SpectralFunction::zero(self.group.clone(), Arc::clone(&self.irreps)))
        }
    }

    fn tail(&self, _t: f64, a: u32, q: f64) -> Result<f64> {
        Ok(if a > 0 || self.truncation == 0.0 {
            0.0
        } else if q == 0.0 {
            self.truncation
        } else {
            f64::INFINITY
        })
    }
}

/// Sample grid standing in for a space-time region.
#[derive(Debug, Clone)]
pub struct Region {
    pub times: Vec<f64>,
    pub points: Vec<GroupElement>,
}

impl Region {
    pub fn new(times: Vec<f64>, points: Vec<GroupElement>) -> Result<Self> {
        if times.is_empty() || points.is_empty() {
            return Err(Error::Argument("region needs at least one time and one point".into()));
        }
        Ok(Region { times, points })
    }

    /// A purely spatial region (time is irrelevant for static functions).
    pub fn spatial(points: Vec<GroupElement>) -> Result<Self> {
        Self::new(vec![0.0], points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub point: usize,
    pub k: usize,
    pub m: u32,
    pub b: u32,
    pub a: u32,
    pub lambda: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeminormReport {
    pub n: u32,
    pub p: u32,
    pub value: f64,
    pub truncation_certificate: f64,
    pub witness: Option<Witness>,
}

/// One term in a seminorm supremum.
#[derive(Debug, Clone)]
struct Template {
    word: Vec<Op>,
    a: u32,
    k: usize,
    m: u32,
    b: u32,
    lambda: Vec<u32>,
    gain: f64,
    q: f64,
}

const OP_L: usize = 0;
const OP_DELTA: usize = 1;

/// `Λ_π` of `spec` on `irreps`.
pub fn operator_blocks(spec: &SubLaplacianSpec, irreps: &[IrrepIndex]) -> Result<Vec<Coeff>> {
    crate::exec::try_map(irreps, |pi| -> Result<Coeff> {
        Ok(match spec.dpi(pi)? {
            Block::Scalar(l) => Coeff::Scalar(C64::new(l, 0.0)),
            Block::Dense(m) if m.nrows() == 1 => Coeff::Scalar(m[(0, 0)]),
            Block::Dense(m) => Coeff::Dense(m),
        })
    })
}

fn engine_for(spec: &SubLaplacianSpec, frame: &Frame, irreps: Arc<Vec<IrrepIndex>>) -> Result<ChainEngine> {
    let l = operator_blocks(spec, &irreps)?;
    let d = operator_blocks(&spec.reference_operator(1.0), &irreps)?;
    ChainEngine::new(spec.group(), irreps, frame, vec![l, d])
}

fn templates(
    spec: &SubLaplacianSpec,
    frame: &Frame,
    n: u32,
    p: u32,
    allow_delta: bool,
) -> Vec<Template> {
    let (_, big_c) = spec.form_bounds();
    let fgain = frame.gain(&spec.reference().slot_weights(spec.group())) * (frame.len() as f64).sqrt();
    let mut out = Vec::new();
    for a in 0..=p {
        let bmax = if allow_delta { n / 2 } else { 0 };
        for b in 0..=bmax {
            for k in 0..=(n - 2 * b) as usize {
                let mut m = 0;
                while 2 * b + k as u32 + 2 * m <= n {
                    for lam in lambda_enumerate(k, m) {
                        let tail: Vec<Op> = if b > 0 { vec![Op::Pow(OP_DELTA, b)] } else { vec![] };
                        out.push(Template {
                            word: chain::p_word(&lam.entries, OP_L, &tail),
                            a,
                            k,
                            m,
                            b,
                            lambda: lam.entries,
                            gain: big_c.max(0.0).powi(m as i32) * fgain.powi(k as i32),
                            q: m as f64 + 0.5 * k as f64 + b as f64,
                        });
                    }
                    m += 1;
                }
            }
        }
    }
    out
}

/// Chain templates and engine for one seminorm, reusable across fields
/// whose irreps are a prefix of the engine's enumeration.
#[derive(Debug, Clone)]
pub struct ChainNorm {
    engine: ChainEngine,
    temps: Vec<Template>,
    n: u32,
    p: u32,
}

impl ChainNorm {
    /// `M^{N,p}_{Δ,L}` along `frame`.
    pub fn mixed(spec: &SubLaplacianSpec, frame: &Frame, irreps: Arc<Vec<IrrepIndex>>, n: u32, p: u32) -> Result<Self> {
        Ok(ChainNorm {
            engine: engine_for(spec, frame, irreps)?,
            temps: templates(spec, frame, n, p, true),
            n,
            p,
        })
    }

    /// `M^N_L` along `frame`.
    pub fn plain(spec: &SubLaplacianSpec, frame: &Frame, irreps: Arc<Vec<IrrepIndex>>, n: u32) -> Result<Self> {
        Ok(ChainNorm {
            engine: engine_for(spec, frame, irreps)?,
            temps: templates(spec, frame, n, 0, false),
            n,
            p: 0,
        })
    }

    /// Largest `gain` and Casimir degree `q` over the templates, for sizing truncations.
    pub fn budget(&self) -> (f64, f64) {
        self.temps
            .iter()
            .fold((0.0, 0.0), |(g, q), t| (f64::max(g, t.gain), f64::max(q, t.q)))
    }

    pub fn profile(&self, field: &dyn SpectralField, region: &Region) -> Result<Vec<SeminormReport>> {
        let irreps = field.irreps();
        if field.group() != &self.engine.group
            || irreps.len() > self.engine.irreps.len()
            || irreps[..] != self.engine.irreps[..irreps.len()]
        {
            return Err(Error::Structural(
                "field irreps must be a prefix of the seminorm's enumeration".into(),
            ));
        }
        chain_profile(&self.engine, &self.temps, field, region, self.n, self.p)
    }
}

/// Per-time reports in region order.
fn chain_profile(
    engine: &ChainEngine,
    temps: &[Template],
    field: &dyn SpectralField,
    region: &Region,
    n: u32,
    p: u32,
) -> Result<Vec<SeminormReport>> {
    let max_a = temps.iter().map(|t| t.a).max().unwrap_or(0);
    let mut out = Vec::with_capacity(region.times.len());
    for &t in &region.times {
        let fs: Vec<SpectralFunction> = (0..=max_a).map(|a| field.at(t, a)).collect::<Result<_>>()?;
        let mut cert: f64 = 0.0;
        let mut sets = Vec::with_capacity(temps.len());
        for tp in temps {
            sets.push(engine.expand(&tp.word, &fs[tp.a as usize].coeffs)?);
            let tail = field.tail(t, tp.a, tp.q)?;
            if tail > 0.0 {
                cert = cert.max(tp.gain * tail);
            }
        }
        let len = fs[0].irreps.len();
        let per_point: Vec<Vec<f64>> = crate::exec::map(&region.points, |x| {
            let table = engine.table_prefix(x, len);
            sets.iter().map(|s| engine.l2(s, &table)).collect()
        });
        let mut best = -1.0;
        let mut witness = None;
        for (ti, tp) in temps.iter().enumerate() {
            for (xi, vals) in per_point.iter().enumerate() {
                let v = vals[ti];
                if v > best {
                    best = v;
                    witness = Some(Witness {
                        t,
                        point: xi,
                        k: tp.k,
                        m: tp.m,
                        b: tp.b,
                        a: tp.a,
                        lambda: tp.lambda.clone(),
                    });
                }
            }
        }
        out.push(SeminormReport {
            n,
            p,
            value: best.max(0.0),
            truncation_certificate: cert,
            witness,
        });
    }
    Ok(out)
}

/// Maximum of a profile; the certificate is the largest one over all times.
fn sup_of(profile: Vec<SeminormReport>) -> SeminormReport {
    let cert = profile.iter().map(|r| r.truncation_certificate).fold(0.0, f64::max);
    let mut best = profile
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("regions are non-empty");
    best.truncation_certificate = cert;
    best
}

/// `M^N_L` over the region: sup over `k + 2m ≤ N`, `λ ∈ Λ(k,m)` of
/// `(Σ_l |P_L^{l,λ} f|²)^{1/2}`, differentiating along the frame of `L`.
pub fn m_norm(spec: &SubLaplacianSpec, field: &dyn SpectralField, n: u32, region: &Region) -> Result<SeminormReport> {
    m_norm_with_frame(spec, &Frame::of_operator(spec), field, n, region)
}

/// `M^N_L` with an explicit derivative frame.
pub fn m_norm_with_frame(
    spec: &SubLaplacianSpec,
    frame: &Frame,
    field: &dyn SpectralField,
    n: u32,
    region: &Region,
) -> Result<SeminormReport> {
    check_field(spec, field)?;
    let engine = engine_for(spec, frame, field.irreps())?;
    let temps = templates(spec, frame, n, 0, false);
    Ok(sup_of(chain_profile(&engine, &temps, field, region, n, 0)?))
}

/// `M^{N,p}_{Δ,L}`: sup over `a ≤ p`, `2b + k + 2m ≤ N`, `λ ∈ Λ(k,m)` of
/// `(Σ_l |L^{λ0} X_{l1} ... X_{lk} L^{λk} Δ^b ∂_t^a f|²)^{1/2}` with the frame of `Δ`.
pub fn mixed_m_norm(
    spec: &SubLaplacianSpec,
    field: &dyn SpectralField,
    n: u32,
    p: u32,
    region: &Region,
) -> Result<SeminormReport> {
    mixed_m_norm_with_frame(spec, &Frame::delta(spec), field, n, p, region)
}

pub fn mixed_m_norm_with_frame(
    spec: &SubLaplacianSpec,
    frame: &Frame,
    field: &dyn SpectralField,
    n: u32,
    p: u32,
    region: &Region,
) -> Result<SeminormReport> {
    mixed_m_norm_profile(spec, frame, field, n, p, region).map(sup_of)
}

/// `M^{N,p}_{Δ,L}` restricted to each time of the region separately.
pub fn mixed_m_norm_profile(
    spec: &SubLaplacianSpec,
    frame: &Frame,
    field: &dyn SpectralField,
    n: u32,
    p: u32,
    region: &Region,
) -> Result<Vec<SeminormReport>> {
    check_field(spec, field)?;
    let engine = engine_for(spec, frame, field.irreps())?;
    let temps = templates(spec, frame, n, p, true);
    chain_profile(&engine, &temps, field, region, n, p)
}

fn check_field(spec: &SubLaplacianSpec, field: &dyn SpectralField) -> Result<()> {
    if spec.group() != field.group() {
        return Err(Error::Structural("field and operator live on different groups".into()));
    }
    Ok(())
}

/// `|D¹f|_L(x) = (Σ_r |Y_r f(x)|²)^{1/2}` with `L = -Σ Y_r²`.
pub fn grad_seminorm(spec: &SubLaplacianSpec, f: &SpectralFunction, x: &GroupElement) -> Result<f64> {
    dk_pointwise(spec, &Frame::of_operator(spec), f, 1, std::slice::from_ref(x)).map(|v| v[0])
}

/// `|D^k f|(x) = (Σ_{l ∈ I^k} |v_{l1} ... v_{lk} f(x)|²)^{1/2}` for a frame `v`.
pub fn dk_pointwise(
    spec: &SubLaplacianSpec,
    frame: &Frame,
    f: &SpectralFunction,
    k: usize,
    xs: &[GroupElement],
) -> Result<Vec<f64>> {
    if spec.group() != &f.group {
        return Err(Error::Structural("function and operator live on different groups".into()));
    }
    let engine = ChainEngine::new(spec.group(), Arc::clone(&f.irreps), frame, vec![])?;
    let chains = engine.expand(&vec![Op::D; k], &f.coeffs)?;
    Ok(crate::exec::map(xs, |x| engine.l2(&chains, &engine.table(x))))
}

/// `P_L^{l,λ} f` for one index chain `l` (indices into the frame of `L`).
pub fn p_op(
    l: &[usize],
    lambda: &LambdaComposition,
    spec: &SubLaplacianSpec,
    frame: &Frame,
    f: &SpectralFunction,
) -> Result<SpectralFunction> {
    if lambda.entries.len() != l.len() + 1 {
        return Err(Error::Argument(format!(
            "λ has {} entries for a chain of length {}",
            lambda.entries.len(),
            l.len()
        )));
    }
    if let Some(&bad) = l.iter().find(|&&i| i >= frame.len()) {
        return Err(Error::Argument(format!("frame index {bad} out of range")));
    }
    let engine = engine_for(spec, frame, Arc::clone(&f.irreps))?;
    let word = chain::p_word(&lambda.entries, OP_L, &[]);
    let chains = engine.expand(&word, &f.coeffs)?;
    let idx = l.iter().fold(0usize, |acc, &i| acc * frame.len() + i);
    SpectralFunction::new(f.group.clone(), Arc::clone(&f.irreps), chains[idx].clone(), 0.0)
}

/// Outcome of a Minkowski bound comparison at sampled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinkowskiReport {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `min (rhs - lhs)`.
    pub margin: f64,
    pub pass: bool,
}

/// Component function of a vector field.
pub type Component<'a> = &'a (dyn Fn(&GroupElement) -> f64 + Sync);

/// `‖u * v(x)‖_{l²} ≤ (‖u‖_{l²} * ‖v‖_{l²})(x)` where `(u*v)_{ij} = u_i * v_j`
/// and both convolutions use the same quadrature rule.
pub fn minkowski_check(
    group: &GroupSpec,
    rule: &QuadratureRule,
    u: &[Component<'_>],
    v: &[Component<'_>],
    xs: &[GroupElement],
) -> Result<MinkowskiReport> {
    let u_nodes: Vec<Vec<f64>> = u.iter().map(|ui| rule.nodes.iter().map(ui).collect()).collect();
    let results: Vec<Result<(f64, f64)>> = crate::exec::map(xs, |x| {
        // v evaluated at y⁻¹x for every node
        let shifted: Vec<GroupElement> = rule
            .nodes
            .iter()
            .map(|y| group.multiply(&group.inverse(y)?, x))
            .collect::<Result<_>>()?;
        let v_vals: Vec<Vec<f64>> = v.iter().map(|vj| shifted.iter().map(vj).collect()).collect();
        let mut lhs = crate::linalg::Kahan::default();
        for ui in &u_nodes {
            for vj in &v_vals {
                let c = crate::linalg::ksum(rule.weights.iter().zip(ui.iter().zip(vj)).map(|(w, (a, b))| w * a * b));
                lhs.add(c * c);
            }
        }
        let rhs = crate::linalg::ksum((0..rule.len()).map(|k| {
            let nu = l2_real(u_nodes.iter().map(|c| c[k]));
            let nv = l2_real(v_vals.iter().map(|c| c[k]));
            rule.weights[k] * nu * nv
        }));
        Ok((lhs.value().sqrt(), rhs))
    });
    let pairs: Vec<(f64, f64)> = results.into_iter().collect::<Result<_>>()?;
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let margin = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| r - l)
        .fold(f64::INFINITY, f64::min);
    Ok(MinkowskiReport {
        pass: margin >= -1e-8,
        lhs,
        rhs,
        margin,
    })
}

fn l2_real<I: Iterator<Item = f64>>(it: I) -> f64 {
    crate::linalg::ksum(it.map(|v| v * v)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{irrep_enumerate, FactorKind};
    use crate::operators::BiInvariantLaplacian;
    use std::f64::consts::PI;

    #[test]
    fn lambda_examples() {
        let l: Vec<Vec<u32>> = lambda_enumerate(2, 2).into_iter().map(|l| l.entries).collect();
        assert_eq!(
            l,
            vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2], vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]
        );
        assert_eq!(lambda_enumerate(3, 0).len(), 1);
        assert_eq!(lambda_enumerate(3, 2).len(), 10);
    }

    fn circle() -> (GroupSpec, SubLaplacianSpec) {
        let g = GroupSpec::circle();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        (g, d)
    }

    fn cosine(g: &GroupSpec) -> SpectralFunction {
        let irreps = Arc::new(irrep_enumerate(g, &[1.0], 1.0).unwrap());
        let coeffs = irreps
            .iter()
            .map(|p| Coeff::Scalar(C64::new(if p.labels[0] == 0 { 0.0 } else { 0.5 }, 0.0)))
            .collect();
        SpectralFunction::new(g.clone(), irreps, coeffs, 0.0).unwrap()
    }

    #[test]
    fn gradient_of_cosine() {
        let (g, d) = circle();
        let f = cosine(&g);
        for th in [0.3, 1.0, 2.5, 4.0] {
            let x = g.exp_dir(0, th).unwrap();
            let v = grad_seminorm(&d, &f, &x).unwrap();
            assert!((v - f64::sin(th).abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn p_op_multiplies_by_casimir() {
        let g = GroupSpec::circle();
        let l = SubLaplacianSpec::new(
            g.clone(),
            crate::linalg::RMat::from_element(1, 1, 2.0),
            BiInvariantLaplacian::unit(&g),
        )
        .unwrap();
        let f = cosine(&g);
        let lam = LambdaComposition { entries: vec![1] };
        let out = p_op(&[], &lam, &l, &Frame::of_operator(&l), &f).unwrap();
        for (a, b) in out.coeffs.iter().zip(&f.coeffs) {
            assert_eq!(*a, b.scale(C64::new(2.0, 0.0)));
        }
        assert!(p_op(&[0], &lam, &l, &Frame::of_operator(&l), &f).is_err());
    }

    #[test]
    fn m_norm_is_monotone_and_starts_at_sup() {
        let (g, d) = circle();
        let k = SpectralKernel::build(&d, 200.0).unwrap();
        let pts: Vec<GroupElement> = (0..64).map(|i| g.exp_dir(0, 2.0 * PI * i as f64 / 64.0).unwrap()).collect();
        let region = Region::new(vec![1.0], pts.clone()).unwrap();
        let m0 = m_norm(&d, &k, 0, &region).unwrap();
        let m1 = m_norm(&d, &k, 1, &region).unwrap();
        let m2 = m_norm(&d, &k, 2, &region).unwrap();
        let sup = k.densities(1.0, &pts).unwrap().iter().map(|v| v.value).fold(0.0, f64::max);
        assert!((m0.value - sup).abs() < 1e-12);
        assert!(m0.value <= m1.value && m1.value <= m2.value);
    }

    #[test]
    fn minkowski_singleton_is_equality() {
        let g = GroupSpec::circle();
        let rule = crate::group::haar_quadrature(&g, 32).unwrap();
        let u = |x: &GroupElement| match x.parts[0] {
            crate::group::Part::Circle(t) => 1.0 + t.cos(),
            _ => unreachable!(),
        };
        let v = |x: &GroupElement| match x.parts[0] {
            crate::group::Part::Circle(t) => 2.0 + (2.0 * t).sin(),
            _ => unreachable!(),
        };
        let xs: Vec<GroupElement> = (0..8).map(|i| g.exp_dir(0, i as f64).unwrap()).collect();
        let r = minkowski_check(&g, &rule, &[&u], &[&v], &xs).unwrap();
        assert!(r.pass);
        for (a, b) in r.lhs.iter().zip(&r.rhs) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mixed_norm_with_delta_merges_powers() {
        let g = GroupSpec::new(vec![FactorKind::SU2]).unwrap();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let k = SpectralKernel::build(&d, 40.0).unwrap();
        let pts = vec![g.exp_vec(&[0.9, 0.2, -0.4]).unwrap(), g.exp_vec(&[2.0, 0.1, 0.3]).unwrap()];
        let region = Region::new(vec![0.5], pts).unwrap();
        let mixed = mixed_m_norm(&d, &k, 2, 0, &region).unwrap();
        let plain = m_norm(&d, &k, 2, &region).unwrap();
        // with L = Δ, Δ^b is one of the L^m terms, so the sups agree
        assert!((mixed.value - plain.value).abs() < 1e-12 * plain.value);
    }
}

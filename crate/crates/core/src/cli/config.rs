//! Experiment configuration: TOML text, parsed into typed sections and
//! validated. Every failure names the offending key.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FactorKind, GroupSpec};
use crate::linalg::RMat;
use crate::operators::{
    check_diag_dominant, comparability_constants, BandedRule, BiInvariantLaplacian, ComparabilityMethod,
    SubLaplacianSpec,
};

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Circle,
    Su2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// Factor list, e.g. `["circle", "su2"]`.
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaConfig {
    /// One positive weight per factor; default all 1.
    pub weights: Option<Vec<f64>>,
}

/// The perturbed operator `L`. Without this section `L = Δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    /// Dense rows of `A` over the generator slots.
    pub a: Option<Vec<Vec<f64>>>,
    /// Banded rule relative to the Δ weights.
    pub banded: Option<BandedRule>,
    /// Require `ε`-diagonal dominance of `A` before anything runs.
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationConfig {
    /// Largest reference Casimir any kernel may enumerate.
    pub max_cutoff: f64,
    /// Sup-norm tolerance of density tails.
    pub tolerance: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            max_cutoff: 2000.0,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory for the report and the scan tables, relative to the config file.
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("lieheat-out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemigroupParams {
    pub t: f64,
    pub s: f64,
    /// Random sample points for homomorphism, symmetry and spatial checks.
    pub points: usize,
    pub seed: u64,
    /// Casimir cutoff of the representation checks.
    pub rep_cutoff: f64,
    pub rep_tol: f64,
    /// Random `(g, x)` pairs of the centrality check.
    pub centrality_samples: usize,
}

impl Default for SemigroupParams {
    fn default() -> Self {
        SemigroupParams {
            t: 0.5,
            s: 0.5,
            points: 6,
            seed: 1,
            rep_cutoff: 12.0,
            rep_tol: 1e-10,
            centrality_samples: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorChoice {
    #[default]
    L,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductParams {
    /// `w_i = base^i`.
    pub base: f64,
    /// Number of circle factors kept exactly.
    pub d: usize,
    /// Largest admissible analytic tail majorant.
    #[serde(default = "default_tail_max")]
    pub tail_max: f64,
}

fn default_tail_max() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CkStarParams {
    /// `"l"` or `"delta"`.
    pub operator: OperatorChoice,
    pub t_max: f64,
    pub t_min: f64,
    pub points: usize,
    /// Largest admissible `t·M(t)` at `t_min`.
    pub final_max: f64,
    /// Optional weighted circle-product scan.
    pub product: Option<ProductParams>,
}

impl Default for CkStarParams {
    fn default() -> Self {
        CkStarParams {
            operator: OperatorChoice::L,
            t_max: 1.0,
            t_min: 1e-3,
            points: 16,
            final_max: 0.05,
            product: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffDiagonalTuple {
    pub n: u32,
    pub sigma: f64,
    pub a: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OffDiagonalParams {
    pub tuples: Vec<OffDiagonalTuple>,
    /// Scan range `T ≥ t ≥ t_min`.
    pub t_max: f64,
    pub t_min: f64,
    pub points: usize,
    /// Random points of `K`, all at distance `≥ min_distance` from `e`.
    pub k_points: usize,
    pub min_distance: f64,
    pub seed: u64,
    /// Largest admissible ratio of the `t_min` value to the scan maximum.
    pub endpoint_ratio: f64,
}

impl Default for OffDiagonalParams {
    fn default() -> Self {
        OffDiagonalParams {
            tuples: vec![
                OffDiagonalTuple {
                    n: 0,
                    sigma: 1.0,
                    a: 1.0,
                    alpha: 1.0,
                },
                OffDiagonalTuple {
                    n: 2,
                    sigma: 2.0,
                    a: 1.0,
                    alpha: 1.0,
                },
            ],
            t_max: 2.0,
            t_min: 0.015,
            points: 16,
            k_points: 24,
            min_distance: FRAC_PI_2,
            seed: 3,
            endpoint_ratio: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecompositionParams {
    pub k: Vec<u32>,
    pub t: Vec<f64>,
    /// Sample points of the spatial cross-check (0 skips it).
    pub points: usize,
    pub seed: u64,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams {
            k: vec![1, 2, 3],
            t: vec![0.25, 0.5, 1.0],
            points: 3,
            seed: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinkowskiParams {
    pub pairs: usize,
    pub seed: u64,
    /// Casimir cutoff of the random trigonometric polynomials.
    pub cutoff: f64,
    /// Components of `u` and of `v`.
    pub components: usize,
    pub points: usize,
}

impl Default for MinkowskiParams {
    fn default() -> Self {
        MinkowskiParams {
            pairs: 100,
            seed: 5,
            cutoff: 4.0,
            components: 2,
            points: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormEquivalenceParams {
    /// Random basis changes `T = I + perturbation·G`, `G` standard normal.
    pub count: usize,
    pub perturbation: f64,
    pub seed: u64,
    pub k_max: usize,
    /// Budget `N` of the chain forms (0 skips them).
    pub form_order: u32,
    /// Random test functions and their Casimir cutoff.
    pub battery: usize,
    pub battery_cutoff: f64,
    pub points: usize,
}

impl Default for NormEquivalenceParams {
    fn default() -> Self {
        NormEquivalenceParams {
            count: 20,
            perturbation: 0.3,
            seed: 11,
            k_max: 3,
            form_order: 2,
            battery: 2,
            battery_cutoff: 4.0,
            points: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollifyParams {
    /// Casimir cutoff of the band-limited step datum.
    pub step_cutoff: f64,
    /// Smoothing scale of the refinement study and its lattice steps.
    pub tau: f64,
    pub refinement_dt: Vec<f64>,
    pub refinement_window: (f64, f64),
    pub refinement_max: f64,
    pub points: usize,
    /// τ-derivative scans: lattice, U's interval, η and the two regions.
    pub scan_dt: f64,
    pub scan_interval: (f64, f64),
    pub eta_inner: (f64, f64),
    pub eta_outer: (f64, f64),
    pub interior: (f64, f64),
    pub control: (f64, f64),
    pub region_times: usize,
    /// Steps 1–4 diagnostic along `path` of `(α, τ)`.
    pub path: Vec<(f64, f64)>,
    pub datum_decay: f64,
    pub diagnostic_interval: (f64, f64),
    pub diagnostic_eta_inner: (f64, f64),
    pub diagnostic_eta_outer: (f64, f64),
    pub distance_max: f64,
}

impl Default for MollifyParams {
    fn default() -> Self {
        MollifyParams {
            step_cutoff: 225.0,
            tau: 0.05,
            refinement_dt: vec![1e-3, 5e-4, 2.5e-4],
            refinement_window: (0.3, 0.7),
            refinement_max: 0.01,
            points: 8,
            scan_dt: 1e-4,
            scan_interval: (-0.25, 0.75),
            eta_inner: (-0.1, 0.5),
            eta_outer: (-0.15, 0.6),
            interior: (0.3, 0.45),
            control: (-0.05, 0.1),
            region_times: 21,
            path: vec![(0.01, 0.01), (0.01, 0.001), (0.001, 0.001), (0.001, 0.0003), (0.0003, 0.0003)],
            datum_decay: 0.5,
            diagnostic_interval: (0.15, 0.85),
            diagnostic_eta_inner: (0.3, 0.7),
            diagnostic_eta_outer: (0.2, 0.8),
            distance_max: 1e-3,
        }
    }
}

/// Selected suites; absent sections are skipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuitesConfig {
    pub semigroup: Option<SemigroupParams>,
    pub ck_star: Option<CkStarParams>,
    pub off_diagonal: Option<OffDiagonalParams>,
    pub decomposition: Option<DecompositionParams>,
    pub minkowski: Option<MinkowskiParams>,
    pub norm_equivalence: Option<NormEquivalenceParams>,
    pub mollify: Option<MollifyParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupConfig,
    #[serde(default)]
    pub delta: DeltaConfig,
    pub operator: Option<OperatorConfig>,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub suites: SuitesConfig,
}

/// Operators built from a validated config.
#[derive(Debug, Clone)]
pub struct Operators {
    pub group: GroupSpec,
    pub delta: SubLaplacianSpec,
    pub l: SubLaplacianSpec,
}

impl Operators {
    pub fn pick(&self, which: OperatorChoice) -> &SubLaplacianSpec {
        match which {
            OperatorChoice::L => &self.l,
            OperatorChoice::Delta => &self.delta,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| config_err("<document>", e.message().to_string()))?;
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let key = e.path().to_string();
            let message = e.into_inner().to_string();
            let message = message.lines().next().unwrap_or_default().trim().to_string();
            config_err(if key == "." { "<document>" } else { &key }, message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err("<file>", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn group_spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(
            self.group
                .factors
                .iter()
                .map(|f| match f {
                    Factor::Circle => FactorKind::Circle,
                    Factor::Su2 => FactorKind::SU2,
                })
                .collect(),
        )
        .map_err(|e| config_err("group.factors", e.to_string()))
    }

    /// Names of the selected suites in catalog order.
    pub fn selected(&self) -> Vec<&'static str> {
        let s = &self.suites;
        let flags = [
            s.semigroup.is_some(),
            s.ck_star.is_some(),
            s.off_diagonal.is_some(),
            s.decomposition.is_some(),
            s.minkowski.is_some(),
            s.norm_equivalence.is_some(),
            s.mollify.is_some(),
        ];
        super::SUITES
            .iter()
            .zip(flags)
            .filter(|(_, f)| *f)
            .map(|(s, _)| s.name)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.group.factors.is_empty() {
            return Err(config_err("group.factors", "at least one factor is required"));
        }
        let group = self.group_spec()?;
        if let Some(w) = &self.delta.weights {
            if w.len() != group.num_factors() {
                return Err(config_err(
                    "delta.weights",
                    format!("{} weights for {} factors", w.len(), group.num_factors()),
                ));
            }
            if w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(config_err("delta.weights", "weights must be positive and finite"));
            }
        }
        if let Some(op) = &self.operator {
            match (&op.a, &op.banded) {
                (Some(_), Some(_)) => return Err(config_err("operator", "give either `a` or `banded`, not both")),
                (None, None) => return Err(config_err("operator", "one of `a` or `banded` is required")),
                (Some(a), None) => {
                    let n = group.basis_len();
                    if a.len() != n || a.iter().any(|r| r.len() != n) {
                        return Err(config_err("operator.a", format!("A must be {n}×{n} over the generator slots")));
                    }
                }
                _ => {}
            }
            if let Some(e) = op.epsilon {
                if !(e > 0.0 && e < 1.0) {
                    return Err(config_err("operator.epsilon", "ε must lie in (0, 1)"));
                }
            }
        }
        let t = &self.truncation;
        if !(t.max_cutoff > 0.0) || !(t.tolerance > 0.0) {
            return Err(config_err("truncation", "max_cutoff and tolerance must be positive"));
        }
        let s = &self.suites;
        if self.selected().is_empty() {
            return Err(config_err("suites", "select at least one suite"));
        }
        if let Some(p) = &s.semigroup {
            positive("suites.semigroup.t", p.t)?;
            positive("suites.semigroup.s", p.s)?;
            at_least("suites.semigroup.points", p.points, 2)?;
            positive("suites.semigroup.rep_cutoff", p.rep_cutoff)?;
        }
        if let Some(p) = &s.ck_star {
            grid("suites.ck_star", p.t_max, p.t_min, p.points)?;
            if let Some(q) = &p.product {
                if !(q.base > 1.0) || q.d == 0 {
                    return Err(config_err("suites.ck_star.product", "needs base > 1 and d ≥ 1"));
                }
            }
        }
        if let Some(p) = &s.off_diagonal {
            grid("suites.off_diagonal", p.t_max, p.t_min, p.points)?;
            at_least("suites.off_diagonal.k_points", p.k_points, 1)?;
            at_least("suites.off_diagonal.tuples", p.tuples.len(), 1)?;
            positive("suites.off_diagonal.min_distance", p.min_distance)?;
            for (i, t) in p.tuples.iter().enumerate() {
                if !(t.alpha > 0.0) || !(t.a >= 0.0) {
                    return Err(config_err(&format!("suites.off_diagonal.tuples[{i}]"), "needs α > 0 and A ≥ 0"));
                }
            }
        }
        if let Some(p) = &s.decomposition {
            at_least("suites.decomposition.k", p.k.len(), 1)?;
            at_least("suites.decomposition.t", p.t.len(), 1)?;
            if p.t.iter().any(|t| !(*t > 0.0)) {
                return Err(config_err("suites.decomposition.t", "times must be positive"));
            }
        }
        if let Some(p) = &s.minkowski {
            at_least("suites.minkowski.pairs", p.pairs, 1)?;
            at_least("suites.minkowski.components", p.components, 1)?;
            at_least("suites.minkowski.points", p.points, 1)?;
            positive("suites.minkowski.cutoff", p.cutoff)?;
        }
        if let Some(p) = &s.norm_equivalence {
            at_least("suites.norm_equivalence.count", p.count, 1)?;
            at_least("suites.norm_equivalence.k_max", p.k_max, 1)?;
            at_least("suites.norm_equivalence.battery", p.battery, 1)?;
            at_least("suites.norm_equivalence.points", p.points, 1)?;
        }
        if let Some(p) = &s.mollify {
            if group.num_factors() != 1 || group.factors()[0] != FactorKind::Circle {
                return Err(config_err("suites.mollify", "the step datum is defined on a single circle"));
            }
            at_least("suites.mollify.refinement_dt", p.refinement_dt.len(), 2)?;
            at_least("suites.mollify.path", p.path.len(), 1)?;
            positive("suites.mollify.tau", p.tau)?;
            positive("suites.mollify.scan_dt", p.scan_dt)?;
        }
        Ok(())
    }

    /// `Δ` and `L`; `L`'s comparability is certified here (exit status 3 when
    /// it fails).
    pub fn operators(&self) -> Result<Operators> {
        let group = self.group_spec()?;
        let reference = match &self.delta.weights {
            Some(w) => BiInvariantLaplacian::new(&group, w.clone()).map_err(|e| config_err("delta.weights", e.to_string()))?,
            None => BiInvariantLaplacian::unit(&group),
        };
        let delta = SubLaplacianSpec::laplacian(group.clone(), reference.clone());
        let l = match &self.operator {
            None => delta.clone(),
            Some(op) => {
                let slot_weights = reference.slot_weights(&group);
                let a = match (&op.a, &op.banded) {
                    (Some(a), _) => {
                        let n = group.basis_len();
                        let flat: Vec<f64> = a.iter().flatten().copied().collect();
                        RMat::from_row_slice(n, n, &flat)
                    }
                    (None, Some(rule)) => rule.matrix(&slot_weights),
                    (None, None) => unreachable!("validated"),
                };
                if let Some(eps) = op.epsilon {
                    if !check_diag_dominant(&a, eps)? {
                        let c = match comparability_constants(&a, &slot_weights, ComparabilityMethod::Gershgorin) {
                            Ok(cert) => cert.c,
                            Err(Error::NotComparable { c }) => c,
                            Err(e) => return Err(e),
                        };
                        return Err(Error::NotComparable { c: c.min(0.0) });
                    }
                }
                // comparability before the positivity check of the constructor
                comparability_constants(&a, &slot_weights, ComparabilityMethod::Eigen)?;
                SubLaplacianSpec::new(group.clone(), a, reference.clone()).map_err(|e| reclassify(e, "operator"))?
            }
        };
        Ok(Operators { group, delta, l })
    }
}

/// Structural and argument errors of a section become config errors; the
/// rest keep their own exit status.
fn reclassify(e: Error, key: &str) -> Error {
    match e {
        Error::Structural(m) | Error::Argument(m) => config_err(key, m),
        other => other,
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(key, format!("must be positive, got {v}")))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(config_err(key, format!("must be at least {min}, got {v}")))
    }
}

fn grid(key: &str, t_max: f64, t_min: f64, points: usize) -> Result<()> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(config_err(&format!("{key}.t_min"), "needs 0 < t_min < t_max"));
    }
    at_least(&format!("{key}.points"), points, 3)
}

/// Documented defaults of every suite, as TOML tables.
pub fn suite_defaults() -> BTreeMap<&'static str, toml::Value> {
    let mut m = BTreeMap::new();
    let v = |x: toml::Value| x;
    m.insert("semigroup", v(toml::Value::try_from(SemigroupParams::default()).expect("serializable")));
    m.insert("ck_star", v(toml::Value::try_from(CkStarParams::default()).expect("serializable")));
    m.insert("off_diagonal", v(toml::Value::try_from(OffDiagonalParams::default()).expect("serializable")));
    m.insert("decomposition", v(toml::Value::try_from(DecompositionParams::default()).expect("serializable")));
    m.insert("minkowski", v(toml::Value::try_from(MinkowskiParams::default()).expect("serializable")));
    m.insert("norm_equivalence", v(toml::Value::try_from(NormEquivalenceParams::default()).expect("serializable")));
    m.insert("mollify", v(toml::Value::try_from(MollifyParams::default()).expect("serializable")));
    m
}

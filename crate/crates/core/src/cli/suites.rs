//! Suite runners. Each takes the validated config and its operators and
//! returns tables plus a summary.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{
    CkStarParams, DecompositionParams, ExperimentConfig, MinkowskiParams, MollifyParams, NormEquivalenceParams,
    OffDiagonalParams as OffDiagonalConfig, Operators, SemigroupParams,
};
use super::report::{Cell, SuiteOutcome, Summary, Table};
use crate::error::{Error, Result};
use crate::group::{irrep_enumerate, quadrature_for_pairs, GroupElement, GroupSpec, IrrepIndex};
use crate::heatkernel::{required_cutoff, SpectralKernel};
use crate::linalg::{CMat, RMat, C64};
use crate::mollify::{
    bounded_tau_derivative_scan, convergence_diagnostic, lattice_times, mixed_norm_on, smooth_by_kernel, tau_grid,
    Smoothness, SpaceTimeFunction, TimeCutoff,
};
use crate::operators::{BasisChange, SubLaplacianSpec};
use crate::seminorms::{minkowski_check, Component, Region};
use crate::spectral::{Coeff, SpectralFunction};
use crate::verify::{
    centrality_check, ck_star_circle_product, ck_star_scan, decomposition_check, distance_from_identity, log_grid,
    norm_equivalence_check, off_diagonal_scan, representation_check, semigroup_check, CircleProduct,
    OffDiagonalParams, RatioRange, ScanResult, BLOCK_TOL, GENERATOR_STEP, NORMALIZATION_TOL, SEMIGROUP_BLOCK_TOL,
    SEMIGROUP_SPATIAL_TOL, SPATIAL_TOL,
};

fn random_points(group: &GroupSpec, n: usize, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| group.random_element(&mut rng)).collect()
}

/// `n` seeded random points at distance `≥ min_distance` from the identity.
pub fn far_points(group: &GroupSpec, weights: &[f64], n: usize, min_distance: f64, seed: u64) -> Result<Vec<GroupElement>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 10_000 * n {
            return Err(Error::Argument(format!(
                "could not draw {n} points at distance ≥ {min_distance} from the identity"
            )));
        }
        let x = group.random_element(&mut rng);
        if distance_from_identity(group, weights, &x) >= min_distance {
            out.push(x);
        }
    }
    Ok(out)
}

/// Random coefficients with standard normal real and imaginary parts.
pub fn random_poly<R: Rng>(group: &GroupSpec, irreps: &Arc<Vec<IrrepIndex>>, rng: &mut R) -> Result<SpectralFunction> {
    let mut z = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let coeffs = irreps
        .iter()
        .map(|p| {
            let d = group.irrep_dim(p);
            if d == 1 {
                Coeff::Scalar(z())
            } else {
                Coeff::Dense(CMat::from_fn(d, d, |_, _| z()))
            }
        })
        .collect();
    SpectralFunction::new(group.clone(), Arc::clone(irreps), coeffs, 0.0)
}

fn kernel_for(spec: &SubLaplacianSpec, t: f64, cfg: &ExperimentConfig) -> Result<SpectralKernel> {
    let cutoff = required_cutoff(spec, t, cfg.truncation.tolerance, 0.0, 1.0, cfg.truncation.max_cutoff)?;
    SpectralKernel::build(spec, cutoff)
}

fn operator_pair(ops: &Operators) -> [(&'static str, &SubLaplacianSpec); 2] {
    [("delta", &ops.delta), ("l", &ops.l)]
}

fn scan_rows(table: &mut Table, prefix: &[Cell], r: &ScanResult) {
    for ((g, v), c) in r.grid.iter().zip(&r.values).zip(&r.certificates) {
        let mut coords = prefix.to_vec();
        coords.extend(g.iter().map(|x| Cell::Num(*x)));
        table.push(coords, *v, *c);
    }
}

fn scan_summary(r: &ScanResult) -> Summary {
    let mut s = Summary::default();
    s.num("sup", r.sup);
    s.num("last", r.last());
    s.num("max_certificate", r.max_certificate());
    s.text("trend", r.trend.to_string());
    s.flag("pass", r.pass);
    s
}

pub fn semigroup(cfg: &ExperimentConfig, ops: &Operators, p: &SemigroupParams) -> Result<SuiteOutcome> {
    let group = &ops.group;
    let weights = ops.delta.reference().weights();
    let points = random_points(group, p.points, p.seed);
    let mut table = Table::new("semigroup", &["operator", "check"]);
    let mut summary = Summary::default();

    let rep = representation_check(group, weights, p.rep_cutoff, &points, p.rep_tol)?;
    for (name, v) in [
        ("homomorphism", rep.homomorphism),
        ("unitarity", rep.unitarity),
        ("schur", rep.schur),
    ] {
        table.push(vec!["group".into(), name.into()], v, p.rep_tol);
    }
    // the central difference is accurate to O(h²) only
    table.push(vec!["group".into(), "generator".into()], rep.generator, 1e2 * GENERATOR_STEP * GENERATOR_STEP);
    let mut s = Summary::default();
    s.int("irreps", rep.irreps);
    s.flag("pass", rep.pass);
    summary.table("representation", s);
    let mut pass = rep.pass;

    for (name, spec) in operator_pair(ops) {
        let kernel = kernel_for(spec, p.t.min(p.s), cfg)?;
        let r = semigroup_check(&kernel, p.t, p.s, &points)?;
        let row = |check: &str| vec![Cell::from(name), Cell::from(check)];
        table.push(row("blockwise"), r.blockwise, SEMIGROUP_BLOCK_TOL);
        table.push(row("spatial"), r.spatial, r.spatial_certificate.max(SEMIGROUP_SPATIAL_TOL));
        table.push(row("normalization"), r.normalization, NORMALIZATION_TOL);
        table.push(row("symmetry_ratio"), r.symmetry_ratio, 1.0);
        table.push(row("positivity_margin"), r.positivity_margin, 0.0);
        let c = centrality_check(&kernel, p.t, p.centrality_samples, p.seed.wrapping_add(1))?;
        table.push(row("centrality_ratio"), c.max_ratio, if c.bi_invariant { 1.0 } else { 10.0 });
        let mut s = Summary::default();
        s.num("cutoff", kernel.cutoff());
        s.int("irreps", kernel.irreps().len());
        s.flag("semigroup_pass", r.pass);
        s.flag("bi_invariant", c.bi_invariant);
        s.flag("centrality_pass", c.pass);
        if !c.bi_invariant {
            let mut w = Summary::default();
            for (k, v) in ["g", "x"].iter().zip([&c.witness_g, &c.witness_x]) {
                w.0.insert(
                    k.to_string(),
                    toml::Value::Array(v.iter().map(|x| toml::Value::Float(*x)).collect()),
                );
            }
            s.table("witness", w);
        }
        summary.table(name, s);
        pass = pass && r.pass && c.pass;
    }
    Ok(SuiteOutcome {
        pass,
        tables: vec![table],
        summary,
    })
}

pub fn ck_star(cfg: &ExperimentConfig, ops: &Operators, p: &CkStarParams) -> Result<SuiteOutcome> {
    let grid = log_grid(p.t_max, p.t_min, p.points);
    let mut table = Table::new("ck_star", &["scan", "t"]);
    let mut summary = Summary::default();
    let r = ck_star_scan(ops.pick(p.operator), &grid, cfg.truncation.max_cutoff)?;
    scan_rows(&mut table, &["operator".into()], &r);
    let mut pass = r.pass && r.last() < p.final_max;
    let mut s = scan_summary(&r);
    s.flag("final_below_bound", r.last() < p.final_max);
    summary.table("operator", s);
    if let Some(q) = &p.product {
        let (r, majorant) = ck_star_circle_product(
            &CircleProduct {
                base: q.base,
                d: q.d,
            },
            &grid,
            cfg.truncation.max_cutoff,
        )?;
        scan_rows(&mut table, &["product".into()], &r);
        let mut s = scan_summary(&r);
        s.num("tail_majorant", majorant);
        s.flag("final_below_bound", r.last() < p.final_max);
        summary.table("product", s);
        pass = pass && r.pass && r.last() < p.final_max && majorant < q.tail_max;
    }
    Ok(SuiteOutcome {
        pass,
        tables: vec![table],
        summary,
    })
}

pub fn off_diagonal(cfg: &ExperimentConfig, ops: &Operators, p: &OffDiagonalConfig) -> Result<SuiteOutcome> {
    let weights = ops.delta.reference().weights();
    let k = far_points(&ops.group, weights, p.k_points, p.min_distance, p.seed)?;
    let grid = log_grid(p.t_max, p.t_min, p.points);
    let mut table = Table::new("off_diagonal", &["n", "sigma", "a", "alpha", "t"]);
    let mut summary = Summary::default();
    let mut pass = true;
    for tup in &p.tuples {
        let mut params = OffDiagonalParams::new(tup.n, tup.sigma, tup.a, tup.alpha, grid.clone());
        params.min_distance = p.min_distance;
        let r = off_diagonal_scan(&ops.l, &k, &params, cfg.truncation.max_cutoff)?;
        scan_rows(
            &mut table,
            &[tup.n.into(), tup.sigma.into(), tup.a.into(), tup.alpha.into()],
            &r,
        );
        let ratio = r.last() / r.sup;
        let ok = r.pass && ratio <= p.endpoint_ratio;
        let mut s = scan_summary(&r);
        s.num("endpoint_ratio", ratio);
        s.flag("pass", ok);
        summary.table(&format!("n{}_sigma{}_a{}_alpha{}", tup.n, tup.sigma, tup.a, tup.alpha), s);
        pass &= ok;
    }
    Ok(SuiteOutcome {
        pass,
        tables: vec![table],
        summary,
    })
}

pub fn decomposition(_cfg: &ExperimentConfig, ops: &Operators, p: &DecompositionParams) -> Result<SuiteOutcome> {
    let points = random_points(&ops.group, p.points, p.seed);
    let mut table = Table::new("decomposition", &["k", "t", "quantity"]);
    let mut summary = Summary::default();
    let mut pass = true;
    for &k in &p.k {
        for &t in &p.t {
            let r = decomposition_check(&ops.l, k, t, None, &points)?;
            let row = |q: &str| vec![Cell::from(k), Cell::from(t), Cell::from(q)];
            table.push(row("residual"), r.residual, BLOCK_TOL);
            table.push(row("residual_l"), r.residual_l, BLOCK_TOL);
            if !points.is_empty() {
                table.push(row("spatial"), r.spatial_residual, SPATIAL_TOL);
            }
            let mut s = Summary::default();
            s.num("epsilon", r.epsilon);
            s.num("alpha", r.alpha);
            s.num("beta", r.beta);
            s.num("spatial_certificate", r.spatial_certificate);
            s.int("irreps", r.irreps);
            s.flag("pass", r.pass);
            summary.table(&format!("k{k}_t{t}"), s);
            pass &= r.pass;
        }
    }
    Ok(SuiteOutcome {
        pass,
        tables: vec![table],
        summary,
    })
}

/// Slack below which the Minkowski bound counts as violated, and the
/// relative tolerance of the equality case.
pub const MINKOWSKI_SLACK: f64 = 1e-8;
pub const MINKOWSKI_EQUALITY_TOL: f64 = 1e-12;

type BoxedComponent = Box<dyn Fn(&GroupElement) -> f64 + Sync>;

pub fn minkowski(_cfg: &ExperimentConfig, ops: &Operators, p: &MinkowskiParams) -> Result<SuiteOutcome> {
    let group = &ops.group;
    let irreps = Arc::new(irrep_enumerate(group, ops.delta.reference().weights(), p.cutoff)?);
    let rule = quadrature_for_pairs(group, &irreps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let points: Vec<GroupElement> = (0..p.points).map(|_| group.random_element(&mut rng)).collect();
    let mut table = Table::new("minkowski", &["case", "point"]);
    let mut summary = Summary::default();
    let mut margin = f64::INFINITY;
    for i in 0..p.pairs {
        let polys: Vec<SpectralFunction> = (0..2 * p.components)
            .map(|_| random_poly(group, &irreps, &mut rng))
            .collect::<Result<_>>()?;
        let comps: Vec<BoxedComponent> = polys
            .into_iter()
            .map(|f| Box::new(move |x: &GroupElement| f.eval(x).map(|e| e.value.re).unwrap_or(f64::NAN)) as Box<_>)
            .collect();
        let refs: Vec<Component<'_>> = comps.iter().map(|b| b.as_ref() as Component<'_>).collect();
        let r = minkowski_check(group, &rule, &refs[..p.components], &refs[p.components..], &points)?;
        for (j, (l, rhs)) in r.lhs.iter().zip(&r.rhs).enumerate() {
            table.push(vec![Cell::Int(i as i64), Cell::from(j)], rhs - l, MINKOWSKI_SLACK);
        }
        margin = margin.min(r.margin);
    }
    // one nonnegative component on each side: the bound is an equality
    let (f, g) = (random_poly(group, &irreps, &mut rng)?, random_poly(group, &irreps, &mut rng)?);
    let u = move |x: &GroupElement| f.eval(x).map(|e| e.value.re.abs()).unwrap_or(f64::NAN);
    let v = move |x: &GroupElement| g.eval(x).map(|e| e.value.re.abs()).unwrap_or(f64::NAN);
    let r = minkowski_check(group, &rule, &[&u], &[&v], &points)?;
    let mut equality = 0.0f64;
    for (j, (l, rhs)) in r.lhs.iter().zip(&r.rhs).enumerate() {
        let rel = (rhs - l).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        equality = equality.max(rel);
        table.push(vec![Cell::from("singleton"), Cell::from(j)], rel, MINKOWSKI_EQUALITY_TOL);
    }
    summary.num("margin", margin);
    summary.num("singleton_relative_gap", equality);
    summary.int("quadrature_nodes", rule.len());
    let pass = margin >= -MINKOWSKI_SLACK && equality <= MINKOWSKI_EQUALITY_TOL;
    Ok(SuiteOutcome {
        pass,
        tables: vec![table],
        summary,
    })
}

fn ratio_rows(table: &mut Table, basis: usize, form: &str, r: &RatioRange) {
    let row = |side: &str| vec![Cell::from(basis), Cell::from(form), Cell::from(r.k), Cell::from(side)];
    table.push(row("lower"), r.min, r.lower);
    table.push(row("upper"), r.max, r.upper);
}

pub fn norm_equivalence(_cfg: &ExperimentConfig, ops: &Operators, p: &NormEquivalenceParams) -> Result<SuiteOutcome> {
    let group = &ops.group;
    let n = group.basis_len();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let irreps = Arc::new(irrep_enumerate(group, ops.delta.reference().weights(), p.battery_cutoff)?);
    let battery: Vec<SpectralFunction> = (0..p.battery)
        .map(|_| random_poly(group, &irreps, &mut rng))
        .collect::<Result<_>>()?;
    let points: Vec<GroupElement> = (0..p.points).map(|_| group.random_element(&mut rng)).collect();
    let mut table = Table::new("norm_equivalence", &["basis", "form", "k", "side"]);
    let mut summary = Summary::default();
    let mut pass = true;
    let mut violations = 0;
    for i in 0..p.count {
        let g = RMat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let t = BasisChange::new(RMat::identity(n, n) + g * p.perturbation)?;
        let r = norm_equivalence_check(&ops.delta, &t, p.k_max, &battery, &points, p.form_order)?;
        for s in &r.sk {
            ratio_rows(&mut table, i, &s.label, s);
            violations += s.violations;
        }
        for f in &r.forms {
            let lam: Vec<String> = f.lambda.iter().map(|l| l.to_string()).collect();
            let tag = format!("b{}_m{}_lambda{}", f.b, f.m, lam.join("-"));
            ratio_rows(&mut table, i, &format!("{tag}:y/x"), &f.y_over_x);
            ratio_rows(&mut table, i, &format!("{tag}:xy/xx"), &f.paired_over_xx);
            violations += f.y_over_x.violations + f.paired_over_xx.violations;
        }
        let mut s = Summary::default();
        s.num("c", r.c);
        s.num("C", r.big_c);
        s.int("forms", r.forms.len());
        s.flag("pass", r.pass);
        summary.table(&format!("basis{i}"), s);
        pass &= r.pass;
    }
    summary.int("violations", violations);
    Ok(SuiteOutcome {
        pass,
        tables: vec![table],
        summary,
    })
}

/// Band-limited indicator of the upper half circle.
fn step_coeffs(irreps: &[IrrepIndex]) -> Vec<Coeff> {
    irreps
        .iter()
        .map(|p| {
            let n = p.labels[0];
            Coeff::Scalar(if n == 0 {
                C64::new(0.5, 0.0)
            } else if n % 2 != 0 {
                C64::new(0.0, -1.0 / (PI * n as f64))
            } else {
                C64::new(0.0, 0.0)
            })
        })
        .collect()
}

fn lattice_len(interval: (f64, f64), dt: f64) -> (i64, usize) {
    let k0 = (interval.0 / dt).ceil() as i64;
    let k1 = (interval.1 / dt).floor() as i64;
    (k0, (k1 - k0 + 1).max(0) as usize)
}

pub fn mollify(_cfg: &ExperimentConfig, ops: &Operators, p: &MollifyParams) -> Result<SuiteOutcome> {
    let group = &ops.group;
    let dk = SpectralKernel::build(&ops.delta, p.step_cutoff)?;
    let lk = SpectralKernel::build_on(&ops.l, Arc::clone(dk.irreps()), p.step_cutoff)?;
    let step = step_coeffs(dk.irreps());
    let points: Vec<GroupElement> = (0..p.points)
        .map(|i| group.exp_dir(0, 2.0 * PI * (i as f64 + 0.05) / p.points as f64))
        .collect::<Result<_>>()?;
    let mut summary = Summary::default();

    // rough in time: W = H(t - 1/2) b
    let mut refinement = Table::new("mollify_refinement", &["dt"]);
    let b = SpectralFunction::new(group.clone(), Arc::clone(dk.irreps()), step.clone(), 0.0)?;
    let mut prev: Option<f64> = None;
    let mut change = f64::INFINITY;
    for &dt in &p.refinement_dt {
        let (k0, n) = lattice_len((0.0, 1.0), dt);
        let w = SpaceTimeFunction::separable(&b, dt, k0, n, false, Smoothness::Rough, |t| {
            if t >= 0.5 {
                1.0
            } else {
                0.0
            }
        })?;
        let out = smooth_by_kernel(&w, p.tau, &lk, p.refinement_window)?;
        let region = Region::new(lattice_times(&out, p.refinement_window, 0), points.clone())?;
        let m = mixed_norm_on(&ops.delta, &out, 2, 1, &region)?;
        refinement.push(vec![dt.into()], m.value, m.truncation_certificate);
        if let Some(v) = prev {
            change = (m.value - v).abs() / v.abs();
        }
        prev = Some(m.value);
    }
    let refinement_ok = change < p.refinement_max;
    let mut s = Summary::default();
    s.num("last_relative_change", change);
    s.flag("pass", refinement_ok);
    summary.table("refinement", s);

    // U: heat extension of the step by L, zero before t = 0
    let dt = p.scan_dt;
    let (k0, n) = lattice_len(p.scan_interval, dt);
    let blocks = lk.blocks().to_vec();
    let datum = step.clone();
    let u = SpaceTimeFunction::from_fn(group, Arc::clone(dk.irreps()), dt, k0, n, false, Smoothness::Rough, move |t| {
        Ok(if t < 0.0 {
            vec![Coeff::zero(); datum.len()]
        } else {
            blocks.iter().zip(&datum).map(|(bl, c)| bl.apply(|x| (-t * x).exp()).mul(c)).collect()
        })
    })?;
    let eta = TimeCutoff::new(p.eta_inner, p.eta_outer)?;
    let taus = tau_grid(crate::mollify::c0(u.interval(), eta.support()), dt);
    let mut scans = Vec::new();
    for (name, window) in [("interior", p.interior), ("control", p.control)] {
        let region = Region::new(lattice_times(&u, window, p.region_times), points.clone())?;
        let r = bounded_tau_derivative_scan(&u, &eta, &ops.delta, &dk, &lk, 2, 1, &region, &taus)?;
        let mut t = Table::new(format!("mollify_tau_{name}"), &["tau"]);
        scan_rows(&mut t, &[], &r);
        summary.table(&format!("tau_{name}"), scan_summary(&r));
        scans.push((t, r));
    }
    let interior_ok = scans[0].1.pass;
    let control_diverges = !scans[1].1.pass;

    // smooth datum: the family converges to ηU
    let decay = p.datum_decay;
    let u0: Vec<f64> = dk.irreps().iter().map(|q| decay.powi(q.labels[0].abs())).collect();
    let blocks = lk.blocks().to_vec();
    let uf = move |t: f64| Ok(blocks.iter().zip(&u0).map(|(b, c)| b.apply(|x| c * (-t * x).exp())).collect());
    let deta = TimeCutoff::new(p.diagnostic_eta_inner, p.diagnostic_eta_outer)?;
    let rows = convergence_diagnostic(
        uf,
        &dk,
        p.diagnostic_interval,
        &deta,
        &dk,
        &lk,
        &p.path,
        p.diagnostic_eta_inner,
        101,
        &points,
    )?;
    let mut conv = Table::new("mollify_convergence", &["alpha", "tau", "dt"]);
    for r in &rows {
        conv.push(vec![r.alpha.into(), r.tau.into(), r.dt.into()], r.distance, p.distance_max);
    }
    let last = rows.last().map(|r| r.distance).unwrap_or(f64::INFINITY);
    let conv_ok = last < p.distance_max;
    let mut s = Summary::default();
    s.num("final_distance", last);
    s.flag("pass", conv_ok);
    summary.table("convergence", s);
    summary.flag("interior_bounded", interior_ok);
    summary.flag("control_diverges", control_diverges);

    let mut tables = vec![refinement];
    tables.extend(scans.into_iter().map(|(t, _)| t));
    tables.push(conv);
    Ok(SuiteOutcome {
        pass: refinement_ok && interior_ok && control_diverges && conv_ok,
        tables,
        summary,
    })
}

//! Basis-change equivalence of `|D^k f|` and of the mixed chain forms.
//!
//! With `Y = T·X` and singular values of `T` in `[c, C]`, pointwise
//! `c^k |D^k_X f| ≤ |D^k_Y f| ≤ C^k |D^k_X f|`. For `L = -Σ Y_j²` the chains
//! `L^{λ0} Y L^{λ1} ... Y L^{λk} Δ^b` and `... X_l Y_l' ...` obey the same
//! bounds against the X-chains (`... X_l X_l' ...` for the paired form).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::operators::{basis_change_bounds, BasisChange, SubLaplacianSpec};
use crate::seminorms::{dk_pointwise, lambda_enumerate, operator_blocks, p_word, ChainEngine, Frame, Op};
use crate::spectral::SpectralFunction;

/// Relative slack of the ratio bounds.
pub const RATIO_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRange {
    pub label: String,
    pub k: usize,
    pub min: f64,
    pub max: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
    pub violations: usize,
}

impl RatioRange {
    fn new(label: String, k: usize, c: f64, big_c: f64) -> Self {
        RatioRange {
            label,
            k,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            lower: c.powi(k as i32),
            upper: big_c.powi(k as i32),
            samples: 0,
            violations: 0,
        }
    }

    /// Records `y` against `x` at one point; `scale` sets the absolute floor.
    fn record(&mut self, x: f64, y: f64, scale: f64) {
        let abs = 1e-12 * (1.0 + scale);
        if y < self.lower * x * (1.0 - RATIO_SLACK) - abs || y > self.upper * x * (1.0 + RATIO_SLACK) + abs {
            self.violations += 1;
        }
        if x > 1e-10 * scale {
            let r = y / x;
            self.min = self.min.min(r);
            self.max = self.max.max(r);
            self.samples += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormBounds {
    pub b: u32,
    pub m: u32,
    pub lambda: Vec<u32>,
    pub y_over_x: RatioRange,
    pub paired_over_xx: RatioRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub sk: Vec<RatioRange>,
    pub forms: Vec<FormBounds>,
    pub pass: bool,
}

/// `X` is the frame of `delta` (`Δ = -Σ X_i²`), `Y_j = Σ_i T_j^i X_i`.
/// `form_order` is the budget `N` of `2b + k + 2m ≤ N` for the chain forms
/// (0 skips them).
pub fn norm_equivalence_check(
    delta: &SubLaplacianSpec,
    t: &BasisChange,
    k_max: usize,
    battery: &[SpectralFunction],
    points: &[GroupElement],
    form_order: u32,
) -> Result<EquivalenceReport> {
    let n = delta.group().basis_len();
    if t.t.nrows() != n || t.t.ncols() != n {
        return Err(Error::Structural(format!("basis change must be {n}×{n}")));
    }
    let (c, big_c) = basis_change_bounds(t)?;
    let x = Frame::delta(delta);
    let y = Frame { rows: &t.t * &x.rows };

    let mut sk: Vec<RatioRange> = (1..=k_max).map(|k| RatioRange::new(format!("S{k}"), k, c, big_c)).collect();
    for f in battery {
        for k in 1..=k_max {
            let sx = dk_pointwise(delta, &x, f, k, points)?;
            let sy = dk_pointwise(delta, &y, f, k, points)?;
            let scale = sx.iter().chain(&sy).copied().fold(0.0, f64::max);
            for (a, b) in sx.iter().zip(&sy) {
                sk[k - 1].record(*a, *b, scale);
            }
        }
    }

    let mut forms = Vec::new();
    if form_order > 0 {
        let a = y.rows.transpose() * &y.rows;
        let l = SubLaplacianSpec::new(delta.group().clone(), a, delta.reference().clone())?;
        for f in battery {
            let mut engine = ChainEngine::with_frames(
                delta.group(),
                Arc::clone(&f.irreps),
                &[&x, &y],
                vec![operator_blocks(&l, &f.irreps)?, operator_blocks(delta, &f.irreps)?],
            )?;
            engine.max_order = 2 * form_order as usize;
            let tables: Vec<_> = crate::exec::map(points, |p| engine.table(p));
            let mut idx = 0;
            for b in 0..=form_order / 2 {
                for k in 1..=(form_order - 2 * b) as usize {
                    let mut m = 0;
                    while 2 * b + k as u32 + 2 * m <= form_order {
                        for lam in lambda_enumerate(k, m) {
                            let tail: Vec<Op> = if b > 0 { vec![Op::Pow(1, b)] } else { vec![] };
                            let base = p_word(&lam.entries, 0, &tail);
                            let subst = |rep: &[Op]| -> Vec<Op> {
                                base.iter()
                                    .flat_map(|o| if *o == Op::D { rep.to_vec() } else { vec![*o] })
                                    .collect()
                            };
                            let eval = |word: Vec<Op>| -> Result<Vec<f64>> {
                                let chains = engine.expand(&word, &f.coeffs)?;
                                Ok(tables.iter().map(|tb| engine.l2(&chains, tb)).collect())
                            };
                            let vx = eval(base.clone())?;
                            let vy = eval(subst(&[Op::Field(1)]))?;
                            let vxy = eval(subst(&[Op::Field(0), Op::Field(1)]))?;
                            let vxx = eval(subst(&[Op::Field(0), Op::Field(0)]))?;
                            if forms.len() <= idx {
                                forms.push(FormBounds {
                                    b,
                                    m,
                                    lambda: lam.entries.clone(),
                                    y_over_x: RatioRange::new("(ii)/(i)".into(), k, c, big_c),
                                    paired_over_xx: RatioRange::new("(iii)/(i,XX)".into(), k, c, big_c),
                                });
                            }
                            let s1 = vx.iter().chain(&vy).copied().fold(0.0, f64::max);
                            let s2 = vxx.iter().chain(&vxy).copied().fold(0.0, f64::max);
                            for p in 0..points.len() {
                                forms[idx].y_over_x.record(vx[p], vy[p], s1);
                                forms[idx].paired_over_xx.record(vxx[p], vxy[p], s2);
                            }
                            idx += 1;
                        }
                        m += 1;
                    }
                }
            }
        }
    }
    let pass = sk.iter().all(|r| r.violations == 0)
        && forms
            .iter()
            .all(|f| f.y_over_x.violations == 0 && f.paired_over_xx.violations == 0);
    Ok(EquivalenceReport {
        c,
        big_c,
        sk,
        forms,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{irrep_enumerate, GroupSpec};
    use crate::linalg::{RMat, C64};
    use crate::operators::BiInvariantLaplacian;
    use crate::spectral::Coeff;

    fn trig(g: &GroupSpec) -> SpectralFunction {
        let irreps = Arc::new(irrep_enumerate(g, &[1.0, 1.0], 5.0).unwrap());
        let coeffs = irreps
            .iter()
            .enumerate()
            .map(|(i, _)| Coeff::Scalar(C64::new(0.3 + 0.1 * i as f64, -0.05 * i as f64)))
            .collect();
        SpectralFunction::new(g.clone(), irreps, coeffs, 0.0).unwrap()
    }

    #[test]
    fn scaling_by_two_is_homogeneous() {
        let g = GroupSpec::torus(2).unwrap();
        let d = SubLaplacianSpec::laplacian(g.clone(), BiInvariantLaplacian::unit(&g));
        let f = trig(&g);
        let pts: Vec<GroupElement> = (0..5).map(|i| g.exp_vec(&[0.7 * i as f64, 0.3 - 0.2 * i as f64]).unwrap()).collect();
        let t = BasisChange::new(RMat::identity(2, 2) * 2.0).unwrap();
        let r = norm_equivalence_check(&d, &t, 3, &[f], &pts, 2).unwrap();
        assert!(r.pass);
        for s in &r.sk {
            let want = 2f64.powi(s.k as i32);
            assert!((s.min - want).abs() < 1e-12 && (s.max - want).abs() < 1e-12);
        }
    }
}

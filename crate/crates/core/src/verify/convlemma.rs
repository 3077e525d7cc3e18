//! If `u_t` and `v_t` are small off the identity as `t ↓ 0`, so is `u_t * v_t`.

use std::sync::Arc;

use serde::Serialize;

use super::{ScanResult, Trend};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, QuadratureRule};
use crate::spectral::SpectralFunction;

/// One member `u_t` of a family.
#[derive(Clone)]
pub enum FamilyMember {
    Spectral(SpectralFunction),
    Pointwise(Arc<dyn Fn(&GroupElement) -> f64 + Send + Sync>),
}

impl FamilyMember {
    fn eval(&self, x: &GroupElement) -> f64 {
        match self {
            FamilyMember::Spectral(f) => f.eval_with(&f.rep_table(x)).re,
            FamilyMember::Pointwise(f) => f(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvLemmaReport {
    pub scan: ScanResult,
    pub pass: bool,
    /// `(t, index into K)` of the largest `|u_t * v_t|`.
    pub witness_t: f64,
    pub witness_point: usize,
}

/// `sup_K |u_t * v_t|` by quadrature along a decreasing `t_grid`. Passes when
/// the values decrease towards the end and the last one is at most
/// `final_ratio` times the largest.
#[allow(clippy::too_many_arguments)]
pub fn conv_offdiag_lemma_check(
    group: &GroupSpec,
    rule: &QuadratureRule,
    u: &(dyn Fn(f64) -> Result<FamilyMember> + Sync),
    v: &(dyn Fn(f64) -> Result<FamilyMember> + Sync),
    k_points: &[GroupElement],
    t_grid: &[f64],
    final_ratio: f64,
) -> Result<ConvLemmaReport> {
    if k_points.is_empty() || t_grid.is_empty() {
        return Err(Error::Argument("lemma check needs points and times".into()));
    }
    let mut values = Vec::with_capacity(t_grid.len());
    let mut witness = (t_grid[0], 0usize, f64::NEG_INFINITY);
    for &t in t_grid {
        let ut = u(t)?;
        let vt = v(t)?;
        let v_nodes: Vec<f64> = crate::exec::map(&rule.nodes, |y| vt.eval(y));
        let per_point: Vec<Result<f64>> = crate::exec::map(k_points, |x| {
            let mut acc = crate::linalg::Kahan::default();
            for ((y, w), g) in rule.nodes.iter().zip(&rule.weights).zip(&v_nodes) {
                let xy = group.multiply(x, &group.inverse(y)?)?;
                acc.add(w * ut.eval(&xy) * g);
            }
            Ok(acc.value().abs())
        });
        let per_point: Vec<f64> = per_point.into_iter().collect::<Result<_>>()?;
        let (i, m) = per_point
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if m > witness.2 {
            witness = (t, i, m);
        }
        values.push(m);
    }
    let scan = ScanResult::new(
        vec!["t".into()],
        t_grid.iter().map(|&t| vec![t]).collect(),
        values,
        vec![0.0; t_grid.len()],
    );
    let pass = scan.trend == Trend::Decreasing && scan.last() <= final_ratio * scan.sup;
    Ok(ConvLemmaReport {
        pass,
        witness_t: witness.0,
        witness_point: witness.1,
        scan,
    })
}

//! Per-irrep coefficients of derivative chains.
//!
//! A chain is a word of operators written in operator order, so the leftmost
//! entry is applied last. For `f` with coefficients `F_π`, a field `v` acts by
//! `dπ(v) F_π` and an operator with blocks `Λ_π` by `Λ_π F_π`; the coefficients
//! of a chain are therefore the block products in the same order as the word.
//! Derivative slots range over a frame; expanding from the right shares every
//! suffix between the `|frame|^k` index tuples.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, IrrepIndex};
use crate::linalg::{symmetric_sqrt, Kahan, RMat, C64};
use crate::operators::{BasisChange, SubLaplacianSpec};
use crate::spectral::{Coeff, RepTable};

/// Default cap on the chain length.
pub const MAX_ORDER: usize = 3;
/// Default cap on the frame size.
pub const MAX_FRAME: usize = 9;

/// Left-invariant fields `v_r = Σ_i rows[r][i] X_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub rows: RMat,
}

impl Frame {
    pub fn standard(n: usize) -> Self {
        Frame {
            rows: RMat::identity(n, n),
        }
    }

    /// `sqrt(w_i) X_i`, so that `Δ = -Σ v_r²`.
    pub fn delta(spec: &SubLaplacianSpec) -> Self {
        let w = spec.reference().slot_weights(spec.group());
        Frame {
            rows: RMat::from_diagonal(&nalgebra::DVector::from_iterator(w.len(), w.iter().map(|x| x.sqrt()))),
        }
    }

    /// Rows of `sqrt(A)`, so that `L = -Σ v_r²`.
    pub fn of_operator(spec: &SubLaplacianSpec) -> Self {
        Frame {
            rows: symmetric_sqrt(spec.a()),
        }
    }

    /// `Y_j = Σ_i T_j^i X_i`.
    pub fn from_basis_change(t: &BasisChange) -> Self {
        Frame { rows: t.t.clone() }
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    /// `max_r Σ_i |rows[r][i]| / sqrt(w_i)`: with it, `‖dπ(v_r)‖ ≤ gain · sqrt(cas(π))`.
    pub fn gain(&self, slot_weights: &[f64]) -> f64 {
        (0..self.rows.nrows())
            .map(|r| {
                (0..self.rows.ncols())
                    .map(|i| self.rows[(r, i)].abs() / slot_weights[i].sqrt())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `dπ(v_r)` for every field and irrep, indexed `[r][π]`.
    pub fn blocks(&self, group: &GroupSpec, irreps: &[IrrepIndex]) -> Result<Vec<Vec<Coeff>>> {
        if self.rows.ncols() != group.basis_len() {
            return Err(Error::Structural(format!(
                "frame has {} columns, basis has {} slots",
                self.rows.ncols(),
                group.basis_len()
            )));
        }
        let gens: Vec<Vec<crate::linalg::CMat>> = crate::exec::try_map(irreps, |pi| {
            (0..group.basis_len())
                .map(|i| group.generator_matrix(pi, i))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok((0..self.rows.nrows())
            .map(|r| {
                irreps
                    .iter()
                    .enumerate()
                    .map(|(p, pi)| {
                        let d = group.irrep_dim(pi);
                        let mut m = crate::linalg::CMat::zeros(d, d);
                        for (i, g) in gens[p].iter().enumerate().take(group.basis_len()) {
                            let c = self.rows[(r, i)];
                            if c != 0.0 {
                                m += g * C64::new(c, 0.0);
                            }
                        }
                        if d == 1 {
                            Coeff::Scalar(m[(0, 0)])
                        } else {
                            Coeff::Dense(m)
                        }
                    })
                    .collect()
            })
            .collect())
    }
}

/// One letter of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// A field of the first frame; ranges over the whole frame.
    D,
    /// A field of frame number `n`.
    Field(usize),
    /// Power of operator number `op`.
    Pow(usize, u32),
}

/// Frame blocks and operator blocks on a fixed irrep enumeration.
#[derive(Debug, Clone)]
pub struct ChainEngine {
    pub group: GroupSpec,
    pub irreps: Arc<Vec<IrrepIndex>>,
    frames: Vec<Vec<Vec<Coeff>>>,
    operators: Vec<Vec<Coeff>>,
    pub max_order: usize,
}

impl ChainEngine {
    pub fn new(
        group: &GroupSpec,
        irreps: Arc<Vec<IrrepIndex>>,
        frame: &Frame,
        operators: Vec<Vec<Coeff>>,
    ) -> Result<Self> {
        Self::with_frames(group, irreps, &[frame], operators)
    }

    /// Engine with several frames; `Op::Field(n)` ranges over `frames[n]`.
    pub fn with_frames(
        group: &GroupSpec,
        irreps: Arc<Vec<IrrepIndex>>,
        frames: &[&Frame],
        operators: Vec<Vec<Coeff>>,
    ) -> Result<Self> {
        if let Some(f) = frames.iter().find(|f| f.len() > MAX_FRAME) {
            return Err(Error::Cost(format!(
                "frame of {} fields exceeds the cap of {MAX_FRAME}",
                f.len()
            )));
        }
        if frames.is_empty() {
            return Err(Error::Argument("at least one frame is required".into()));
        }
        for o in &operators {
            if o.len() != irreps.len() {
                return Err(Error::Structural("operator blocks do not match irreps".into()));
            }
        }
        Ok(ChainEngine {
            group: group.clone(),
            frames: frames
                .iter()
                .map(|f| f.blocks(group, &irreps))
                .collect::<Result<_>>()?,
            irreps,
            operators,
            max_order: MAX_ORDER,
        })
    }

    pub fn frame_len(&self) -> usize {
        self.frames[0].len()
    }

    fn power(&self, op: usize, p: u32, c: &[Coeff]) -> Vec<Coeff> {
        let blocks = &self.operators[op];
        c.iter()
            .zip(blocks)
            .map(|(x, b)| {
                let mut y = x.clone();
                for _ in 0..p {
                    y = b.mul(&y);
                }
                y
            })
            .collect()
    }

    /// Coefficients of the chain for every derivative index tuple, with the
    /// first derivative slot as the most significant digit. `f` may cover a
    /// prefix of the engine's irreps.
    pub fn expand(&self, word: &[Op], f: &[Coeff]) -> Result<Vec<Vec<Coeff>>> {
        let k = word.iter().filter(|o| !matches!(o, Op::Pow(..))).count();
        if k > self.max_order {
            return Err(Error::Cost(format!(
                "chain of {k} derivatives exceeds the cap of {}",
                self.max_order
            )));
        }
        if f.len() > self.irreps.len() {
            return Err(Error::Structural("coefficients do not match irreps".into()));
        }
        let mut current = vec![f.to_vec()];
        for op in word.iter().rev() {
            current = match *op {
                Op::Pow(o, p) => {
                    if o >= self.operators.len() {
                        return Err(Error::Argument(format!("unknown operator {o}")));
                    }
                    if p == 0 {
                        current
                    } else {
                        crate::exec::map(&current, |c| self.power(o, p, c))
                    }
                }
                Op::D | Op::Field(_) => {
                    let n = if let Op::Field(n) = *op { n } else { 0 };
                    let frame = self
                        .frames
                        .get(n)
                        .ok_or_else(|| Error::Argument(format!("unknown frame {n}")))?;
                    let pairs: Vec<(usize, usize)> = (0..frame.len())
                        .flat_map(|r| (0..current.len()).map(move |e| (r, e)))
                        .collect();
                    crate::exec::map(&pairs, |&(r, e)| {
                        current[e]
                            .iter()
                            .zip(&frame[r])
                            .map(|(c, g)| g.mul(c))
                            .collect()
                    })
                }
            };
        }
        Ok(current)
    }

    /// Value of each expanded chain at the point encoded by `table`.
    pub fn values(&self, chains: &[Vec<Coeff>], table: &RepTable) -> Vec<C64> {
        chains
            .iter()
            .map(|c| {
                let mut acc = crate::linalg::KahanComplex::default();
                for (pi, x) in self.irreps.iter().zip(c) {
                    if x.is_zero() {
                        continue;
                    }
                    acc.add(table.trace(pi, x) * self.group.irrep_dim(pi) as f64);
                }
                acc.value()
            })
            .collect()
    }

    /// `(Σ_l |v_l|²)^{1/2}`.
    pub fn l2(&self, chains: &[Vec<Coeff>], table: &RepTable) -> f64 {
        l2_norm(&self.values(chains, table))
    }

    /// Irreps that need dense representation matrices for these chains.
    pub fn dense_mask(&self) -> Vec<bool> {
        self.irreps.iter().map(|p| self.group.irrep_dim(p) > 1).collect()
    }

    pub fn table(&self, x: &crate::group::GroupElement) -> RepTable {
        self.table_prefix(x, self.irreps.len())
    }

    /// Table covering the first `n` irreps.
    pub fn table_prefix(&self, x: &crate::group::GroupElement, n: usize) -> RepTable {
        let n = n.min(self.irreps.len());
        RepTable::new(&self.group, &self.irreps[..n], &self.dense_mask()[..n], x)
    }
}

/// Compensated `(Σ |v|²)^{1/2}`; the sum runs in index order.
pub fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).collect::<Kahan>().value().sqrt()
}

/// Chain word `L^{λ0} D L^{λ1} D ... D L^{λk}` followed by `tail`.
pub fn p_word(lambda: &[u32], op: usize, tail: &[Op]) -> Vec<Op> {
    let mut w = Vec::with_capacity(2 * lambda.len() + tail.len());
    for (i, &l) in lambda.iter().enumerate() {
        if i > 0 {
            w.push(Op::D);
        }
        if l > 0 {
            w.push(Op::Pow(op, l));
        }
    }
    w.extend_from_slice(tail);
    w
}

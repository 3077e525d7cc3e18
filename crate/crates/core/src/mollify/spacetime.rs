//! Functions on a time lattice `t_k = k·dt` with spectral values in space.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, IrrepIndex};
use crate::linalg::C64;
use crate::seminorms::SpectralField;
use crate::spectral::{Coeff, SpectralFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    Rough,
    BandLimited,
}

/// Samples `f(t_k, ·)` for `t_k = (k0 + i)·dt`, `i < samples.len()`, each a
/// set of Fourier coefficients on a shared irrep enumeration. Outside the
/// lattice range the function is taken to be zero.
#[derive(Debug, Clone)]
pub struct SpaceTimeFunction {
    pub group: GroupSpec,
    pub irreps: Arc<Vec<IrrepIndex>>,
    pub dt: f64,
    pub k0: i64,
    pub samples: Vec<Vec<Coeff>>,
    /// Vanishes at (and beyond) both ends of the lattice range.
    pub compact: bool,
    pub smoothness: Smoothness,
}

impl SpaceTimeFunction {
    /// Samples `f` at `t_k`, `k = k0 .. k0 + n`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn<F>(
        group: &GroupSpec,
        irreps: Arc<Vec<IrrepIndex>>,
        dt: f64,
        k0: i64,
        n: usize,
        compact: bool,
        smoothness: Smoothness,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Result<Vec<Coeff>> + Sync + Send,
    {
        if !(dt > 0.0) || n == 0 {
            return Err(Error::Argument("time lattice needs dt > 0 and at least one sample".into()));
        }
        let ks: Vec<i64> = (k0..k0 + n as i64).collect();
        let samples = crate::exec::try_map(&ks, |&k| -> Result<Vec<Coeff>> {
            let c = f(k as f64 * dt)?;
            if c.len() != irreps.len() {
                return Err(Error::Structural("sample does not match irreps".into()));
            }
            Ok(c)
        })?;
        Ok(SpaceTimeFunction {
            group: group.clone(),
            irreps,
            dt,
            k0,
            samples,
            compact,
            smoothness,
        })
    }

    /// `a(t) · b` for a time profile `a` and a spatial function `b`.
    pub fn separable<A: Fn(f64) -> f64 + Sync + Send>(
        b: &SpectralFunction,
        dt: f64,
        k0: i64,
        n: usize,
        compact: bool,
        smoothness: Smoothness,
        a: A,
    ) -> Result<Self> {
        Self::from_fn(&b.group, Arc::clone(&b.irreps), dt, k0, n, compact, smoothness, |t| {
            let s = C64::new(a(t), 0.0);
            Ok(b.coeffs.iter().map(|c| c.scale(s)).collect())
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        (self.k0 + i as i64) as f64 * self.dt
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.time(0), self.time(self.len() - 1))
    }

    /// Sample index of the lattice time `t`, if `t` is on the lattice and in range.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = t / self.dt;
        let kr = k.round();
        if (k - kr).abs() > 1e-6 {
            return None;
        }
        let i = kr as i64 - self.k0;
        (i >= 0 && (i as usize) < self.len()).then_some(i as usize)
    }

    pub fn slice(&self, i: usize) -> SpectralFunction {
        SpectralFunction {
            group: self.group.clone(),
            irreps: Arc::clone(&self.irreps),
            coeffs: self.samples[i].clone(),
            truncation: 0.0,
        }
    }

    pub fn eval(&self, i: usize, x: &GroupElement) -> f64 {
        let s = self.slice(i);
        s.eval_with(&s.rep_table(x)).re
    }

    /// Pointwise multiplication by a time profile.
    pub fn times_profile<A: Fn(f64) -> f64 + Sync>(&self, a: A) -> Self {
        let idx: Vec<usize> = (0..self.len()).collect();
        let samples = crate::exec::map(&idx, |&i| {
            let s = C64::new(a(self.time(i)), 0.0);
            self.samples[i].iter().map(|c| c.scale(s)).collect()
        });
        SpaceTimeFunction { samples, ..self.clone() }
    }

    /// Blockwise right multiplication `F_π ↦ B_π F_π` at every time, i.e.
    /// spatial convolution on the right by the function with coefficients `B`.
    pub fn then_blocks(&self, blocks: &[Coeff]) -> Result<Self> {
        if blocks.len() < self.irreps.len() {
            return Err(Error::Structural("blocks do not cover the irreps".into()));
        }
        let samples = crate::exec::map(&self.samples, |s| s.iter().zip(blocks).map(|(c, b)| b.mul(c)).collect());
        Ok(SpaceTimeFunction { samples, ..self.clone() })
    }

    /// `a·self + b·other` on a common lattice.
    pub fn combine(&self, a: f64, other: &SpaceTimeFunction, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let lo = self.k0.min(other.k0);
        let hi = (self.k0 + self.len() as i64).max(other.k0 + other.len() as i64);
        let dims: Vec<usize> = self.irreps.iter().map(|p| self.group.irrep_dim(p)).collect();
        fn get(f: &SpaceTimeFunction, k: i64) -> Option<&Vec<Coeff>> {
            let i = k - f.k0;
            (i >= 0 && (i as usize) < f.len()).then(|| &f.samples[i as usize])
        }
        let ks: Vec<i64> = (lo..hi).collect();
        let samples = crate::exec::map(&ks, |&k| {
            (0..dims.len())
                .map(|p| {
                    let x = get(self, k).map(|s| s[p].scale(C64::new(a, 0.0))).unwrap_or_else(Coeff::zero);
                    let y = get(other, k).map(|s| s[p].scale(C64::new(b, 0.0))).unwrap_or_else(Coeff::zero);
                    x.add(&y, dims[p])
                })
                .collect()
        });
        Ok(SpaceTimeFunction {
            k0: lo,
            samples,
            compact: self.compact && other.compact,
            smoothness: if self.smoothness == Smoothness::Rough || other.smoothness == Smoothness::Rough {
                Smoothness::Rough
            } else {
                Smoothness::BandLimited
            },
            ..self.clone()
        })
    }

    fn check_compatible(&self, other: &SpaceTimeFunction) -> Result<()> {
        if self.group != other.group || self.irreps != other.irreps {
            return Err(Error::Structural("space-time functions use different irreps".into()));
        }
        if ((self.dt - other.dt) / self.dt).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "time steps differ: {} vs {}",
                self.dt, other.dt
            )));
        }
        Ok(())
    }

    /// `∂_t^a` at sample `i` by central differences (`a ≤ 2`).
    pub fn time_derivative(&self, i: usize, a: u32) -> Result<Vec<Coeff>> {
        let dims: Vec<usize> = self.irreps.iter().map(|p| self.group.irrep_dim(p)).collect();
        let lin = |terms: &[(usize, f64)]| -> Vec<Coeff> {
            (0..dims.len())
                .map(|p| {
                    terms.iter().fold(Coeff::zero(), |acc, &(j, w)| {
                        acc.add(&self.samples[j][p].scale(C64::new(w, 0.0)), dims[p])
                    })
                })
                .collect()
        };
        let h = self.dt;
        match a {
            0 => Ok(self.samples[i].clone()),
            1 | 2 if i == 0 || i + 1 >= self.len() => Err(Error::Argument(format!(
                "time derivative at t = {} needs both neighbours on the lattice",
                self.time(i)
            ))),
            1 => Ok(lin(&[(i + 1, 0.5 / h), (i - 1, -0.5 / h)])),
            2 => Ok(lin(&[(i + 1, 1.0 / (h * h)), (i, -2.0 / (h * h)), (i - 1, 1.0 / (h * h))])),
            _ => Err(Error::Argument("time derivatives above order 2 are not supported".into())),
        }
    }
}

/// Time derivatives of a space-time function are central differences on its
/// lattice; the spatial representation is exact, so there is no tail.
impl SpectralField for SpaceTimeFunction {
    fn group(&self) -> &GroupSpec {
        &self.group
    }

    fn irreps(&self) -> Arc<Vec<IrrepIndex>> {
        Arc::clone(&self.irreps)
    }

    fn at(&self, t: f64, a: u32) -> Result<SpectralFunction> {
        let i = self
            .index_of(t)
            .ok_or_else(|| Error::Argument(format!("t = {t} is not a lattice time of the function")))?;
        Ok(SpectralFunction {
            group: self.group.clone(),
            irreps: Arc::clone(&self.irreps),
            coeffs: self.time_derivative(i, a)?,
            truncation: 0.0,
        })
    }

    fn tail(&self, _t: f64, _a: u32, _q: f64) -> Result<f64> {
        Ok(0.0)
    }
}

/// `(f⋆g)(s, x) = ∫_ℝ ∫_G f(t, z) g(s - t, z⁻¹x) dν(z) dt`.
///
/// Time integral: trapezoid rule over the overlap of the two lattice ranges.
/// Group convolution: blockwise products `ĝ·f̂`. One factor must be compactly
/// supported in time.
pub fn spacetime_convolve(f: &SpaceTimeFunction, g: &SpaceTimeFunction) -> Result<SpaceTimeFunction> {
    f.check_compatible(g)?;
    if !f.compact && !g.compact {
        return Err(Error::Argument(
            "space-time convolution needs one factor with compact time support".into(),
        ));
    }
    let (nf, ng) = (f.len(), g.len());
    let dims: Vec<usize> = f.irreps.iter().map(|p| f.group.irrep_dim(p)).collect();
    let ms: Vec<usize> = (0..nf + ng - 1).collect();
    let dt = f.dt;
    let samples = crate::exec::map(&ms, |&m| {
        let lo = m.saturating_sub(ng - 1);
        let hi = m.min(nf - 1);
        (0..dims.len())
            .map(|p| {
                let mut acc = Coeff::zero();
                for i in lo..=hi {
                    let w = if lo == hi {
                        0.0
                    } else if i == lo || i == hi {
                        0.5 * dt
                    } else {
                        dt
                    };
                    if w == 0.0 {
                        continue;
                    }
                    let term = g.samples[m - i][p].mul(&f.samples[i][p]);
                    acc = acc.add(&term.scale(C64::new(w, 0.0)), dims[p]);
                }
                acc
            })
            .collect()
    });
    Ok(SpaceTimeFunction {
        group: f.group.clone(),
        irreps: Arc::clone(&f.irreps),
        dt,
        k0: f.k0 + g.k0,
        samples,
        compact: f.compact && g.compact,
        smoothness: if f.smoothness == Smoothness::Rough && g.smoothness == Smoothness::Rough {
            Smoothness::Rough
        } else {
            Smoothness::BandLimited
        },
    })
}

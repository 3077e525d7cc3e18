//! Spin-j representations of SU(2).
//!
//! Labels are `two_j = 2j`. The basis is `|j,m>` for `m = j, j-1, ..., -j`.
//! Quaternion units `i, j, k` act as `-iσ_x, -iσ_y, -iσ_z` in the defining
//! representation, so the generator of slot `a` is `dπ(X_a) = -i J_a`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::UnitQuaternion;

use crate::linalg::{CMat, HermitianEigen, C64};

pub fn dim(two_j: i32) -> usize {
    (two_j + 1) as usize
}

/// `j(j+1)`.
pub fn casimir(two_j: i32) -> f64 {
    let tj = two_j as f64;
    0.25 * tj * (tj + 2.0)
}

fn m_of(two_j: i32, row: usize) -> f64 {
    0.5 * two_j as f64 - row as f64
}

fn j_plus(two_j: i32) -> CMat {
    let d = dim(two_j);
    let j = 0.5 * two_j as f64;
    let mut jp = CMat::zeros(d, d);
    // J+|m> = sqrt(j(j+1) - m(m+1)) |m+1>; row r holds m = j - r.
    for col in 1..d {
        let m = m_of(two_j, col);
        jp[(col - 1, col)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    jp
}

/// Hermitian spin matrices `[J_x, J_y, J_z]`.
pub fn spin_matrices(two_j: i32) -> [CMat; 3] {
    let d = dim(two_j);
    let jp = j_plus(two_j);
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale(0.5);
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    let jz = CMat::from_fn(d, d, |r, c| {
        if r == c {
            C64::new(m_of(two_j, r), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    [jx, jy, jz]
}

/// Skew-Hermitian generator `dπ_j(X_a) = -i J_a`.
pub fn generator(two_j: i32, slot: usize) -> CMat {
    let j = spin_matrices(two_j);
    &j[slot] * C64::new(0.0, -1.0)
}

fn jy_eigenvectors(two_j: i32) -> Arc<CMat> {
    static CACHE: OnceLock<RwLock<HashMap<i32, Arc<CMat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(w) = cache.read().expect("cache poisoned").get(&two_j) {
        return Arc::clone(w);
    }
    let [_, jy, _] = spin_matrices(two_j);
    let w = Arc::new(HermitianEigen::new(&jy).vectors);
    cache
        .write()
        .expect("cache poisoned")
        .entry(two_j)
        .or_insert(w)
        .clone()
}

fn diag_phase(two_j: i32, angle: f64, ascending: bool) -> Vec<C64> {
    // exp(-i angle m) with m ordered ascending (eigenvector order) or descending (basis order)
    (0..dim(two_j))
        .map(|k| {
            let m = if ascending {
                -0.5 * two_j as f64 + k as f64
            } else {
                m_of(two_j, k)
            };
            C64::from_polar(1.0, -angle * m)
        })
        .collect()
}

/// `exp(-iθ J_y)` through the cached eigenbasis of `J_y`.
fn exp_jy(two_j: i32, theta: f64) -> CMat {
    let w = jy_eigenvectors(two_j);
    let ph = diag_phase(two_j, theta, true);
    let mut scaled = (*w).clone();
    for (c, p) in ph.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= p;
        }
    }
    scaled * w.adjoint()
}

/// Unitary `π_j(q)`.
///
/// With `q = cos(φ/2) + sin(φ/2) n̂`, `π_j(q) = exp(-iφ n̂·J)`. Writing
/// `n̂·J = R J_z R†` for `R = exp(-iϕJ_z) exp(-iθJ_y)` reduces the exponential to
/// diagonal phases.
pub fn rep(two_j: i32, q: &UnitQuaternion<f64>) -> CMat {
    let d = dim(two_j);
    if two_j == 0 {
        return CMat::identity(1, 1);
    }
    let v = q.imag();
    let vn = v.norm();
    let phi = 2.0 * vn.atan2(q.scalar());
    if vn == 0.0 {
        // ±1
        let sign = if q.scalar() > 0.0 || two_j % 2 == 0 { 1.0 } else { -1.0 };
        return CMat::identity(d, d) * C64::new(sign, 0.0);
    }
    let n = v / vn;
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let azimuth = n.y.atan2(n.x);

    let ry = exp_jy(two_j, theta);
    let pz = diag_phase(two_j, azimuth, false);
    // R = diag(pz) * ry
    let mut r = ry;
    for row in 0..d {
        let p = pz[row];
        for c in 0..d {
            r[(row, c)] *= p;
        }
    }
    let ph = diag_phase(two_j, phi, false);
    let mut rd = r.clone();
    for c in 0..d {
        let p = ph[c];
        for row in 0..d {
            rd[(row, c)] *= p;
        }
    }
    rd * r.adjoint()
}

/// `π_j(q)` for every `2j ≤ max_two_j`, by the symmetric-power recursion.
///
/// Spin `j` acts on homogeneous polynomials of degree `n = 2j` in `(u, v)`
/// with orthonormal basis `u^{n-a} v^a / sqrt((n-a)! a!)`, `a = j - m`.
/// Splitting off either linear factor and averaging the two expansions with
/// weights `(n-a)/n` and `a/n` gives, for `π_{1/2}(q) = [[α, γ], [β, δ]]`,
///
/// `n D^n_{ab} = sqrt((n-a)(n-b)) α D_{ab} + sqrt((n-a)b) γ D_{a,b-1}
///             + sqrt(a(n-b)) β D_{a-1,b} + sqrt(ab) δ D_{a-1,b-1}`
///
/// where `D = D^{n-1}`. All weights are at most one, which keeps the recursion
/// stable. Cost is `O(n²)` per label instead of the `O(n³)` of [`rep`].
pub fn rep_ladder(max_two_j: i32, q: &UnitQuaternion<f64>) -> Vec<CMat> {
    let mut out = Vec::with_capacity(max_two_j.max(0) as usize + 1);
    out.push(CMat::identity(1, 1));
    if max_two_j <= 0 {
        return out;
    }
    let (w, x, y, z) = (q.scalar(), q.imag().x, q.imag().y, q.imag().z);
    // w + x i + y j + z k with i, j, k -> -iσ_x, -iσ_y, -iσ_z
    let alpha = C64::new(w, -z);
    let gamma = C64::new(-y, -x);
    let beta = C64::new(y, -x);
    let delta = C64::new(w, z);
    for n in 1..=max_two_j as usize {
        let prev = &out[n - 1];
        let nf = n as f64;
        let sq: Vec<f64> = (0..=n).map(|k| (k as f64).sqrt()).collect();
        let d = CMat::from_fn(n + 1, n + 1, |a, b| {
            let mut acc = C64::new(0.0, 0.0);
            if a < n && b < n {
                acc += alpha * (sq[n - a] * sq[n - b]) * prev[(a, b)];
            }
            if a < n && b > 0 {
                acc += gamma * (sq[n - a] * sq[b]) * prev[(a, b - 1)];
            }
            if a > 0 && b < n {
                acc += beta * (sq[a] * sq[n - b]) * prev[(a - 1, b)];
            }
            if a > 0 && b > 0 {
                acc += delta * (sq[a] * sq[b]) * prev[(a - 1, b - 1)];
            }
            acc / nf
        });
        out.push(d);
    }
    out
}

/// `χ_j(q) = U_{2j}(w)`, the Chebyshev polynomial of the second kind in the real part.
pub fn character(two_j: i32, q: &UnitQuaternion<f64>) -> f64 {
    let w = q.scalar().clamp(-1.0, 1.0);
    let mut prev = 1.0;
    if two_j == 0 {
        return prev;
    }
    let mut cur = 2.0 * w;
    for _ in 1..two_j {
        let next = 2.0 * w * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Rotation angle `φ ∈ [0, 2π]` of `q = cos(φ/2) + sin(φ/2) n̂`.
pub fn angle(q: &UnitQuaternion<f64>) -> f64 {
    2.0 * q.imag().norm().atan2(q.scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use nalgebra::{Quaternion, Vector3};

    fn expm_taylor(m: &CMat) -> CMat {
        // scaling and squaring with a long Taylor series
        let norm = frobenius(m);
        let mut s = 0;
        while norm / f64::powi(2.0, s) > 0.25 {
            s += 1;
        }
        let a = m / C64::new(f64::powi(2.0, s), 0.0);
        let d = m.nrows();
        let mut term = CMat::identity(d, d);
        let mut acc = CMat::identity(d, d);
        for k in 1..30 {
            term = &term * &a / C64::new(k as f64, 0.0);
            acc += &term;
        }
        for _ in 0..s {
            acc = &acc * &acc;
        }
        acc
    }

    #[test]
    fn spin_half_generators_square_to_minus_three_quarters() {
        let sum = (0..3)
            .map(|a| {
                let g = generator(1, a);
                &g * &g
            })
            .fold(CMat::zeros(2, 2), |acc, m| acc + m);
        let target = CMat::identity(2, 2) * C64::new(-0.75, 0.0);
        assert!(frobenius(&(sum - target)) < 1e-14);
    }

    #[test]
    fn rep_matches_generator_exponential() {
        let axis = Vector3::new(0.3, -0.7, 0.5).normalize();
        let phi: f64 = 2.1;
        let q = UnitQuaternion::from_quaternion(Quaternion::from_parts(
            (phi / 2.0).cos(),
            axis * (phi / 2.0).sin(),
        ));
        for two_j in 0..7 {
            let d = dim(two_j);
            let mut x = CMat::zeros(d, d);
            for a in 0..3 {
                x += generator(two_j, a) * C64::new(phi * axis[a], 0.0);
            }
            let oracle = expm_taylor(&x);
            assert!(frobenius(&(rep(two_j, &q) - oracle)) < 1e-12, "2j = {two_j}");
        }
    }

    #[test]
    fn character_is_trace() {
        let q = UnitQuaternion::from_quaternion(Quaternion::new(0.2, 0.5, -0.4, 0.7));
        for two_j in 0..9 {
            let tr = rep(two_j, &q).trace();
            assert!((tr.re - character(two_j, &q)).abs() < 1e-12);
            assert!(tr.im.abs() < 1e-12);
        }
    }

    #[test]
    fn minus_one_acts_by_parity() {
        let q = UnitQuaternion::from_quaternion(Quaternion::new(-1.0, 0.0, 0.0, 0.0));
        assert_eq!(rep(1, &q)[(0, 0)], C64::new(-1.0, 0.0));
        assert_eq!(rep(2, &q)[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn ladder_matches_exponential() {
        let q = UnitQuaternion::from_quaternion(Quaternion::new(0.3, -0.5, 0.6, 0.2));
        let ladder = rep_ladder(12, &q);
        for (tj, m) in ladder.iter().enumerate() {
            let r = rep(tj as i32, &q);
            assert!(frobenius(&(m - r)) < 1e-12, "2j = {tj}");
        }
    }

    #[test]
    fn ladder_stays_unitary_at_high_spin() {
        for quat in [
            Quaternion::new(0.3, -0.5, 0.6, 0.2),
            Quaternion::new(1e-3, 0.8, 0.1, -0.2),
            Quaternion::new(0.9, 1e-4, 0.0, 0.01),
        ] {
            let q = UnitQuaternion::from_quaternion(quat);
            let ladder = rep_ladder(160, &q);
            for (tj, m) in ladder.iter().enumerate().step_by(16) {
                let d = m.nrows();
                let u = m * m.adjoint() - CMat::identity(d, d);
                assert!(crate::linalg::max_abs(&u) < 1e-11, "2j = {tj}");
            }
            let r = rep(120, &q);
            assert!(crate::linalg::max_abs(&(r - &ladder[120])) < 1e-10);
        }
    }
}

//! Period matrices.
//!
//! For real branch points `b_1 < .. < b_N` the canonical basis is
//!
//! ```text
//!   a_j  encircles [b_{2j-1}, b_{2j}]
//!   b_j  is the chain over [b_{2j}, b_{2j+1}], [b_{2j+2}, b_{2j+3}], .., [b_{2g}, b_{2g+1}]
//! ```
//!
//! The sheet is fixed by `y = i^(N-m) sqrt|P(x)|` on the upper lip of the
//! `m`-th interval `(b_m, b_{m+1})`, which is the continuation of a positive
//! `y` to the right of `b_N` through the upper half plane. With
//! `J_m = int_{b_m}^{b_{m+1}} x^k dx / y` this gives the periods
//!
//! ```text
//!   A_kj = -2 J_{2j-1},   B_kj = -2 sum_{l >= j} J_{2l},   Z = A^-1 B.
//! ```
//!
//! Curves with non-real branch points (genus 1 only) are handled by straight
//! segments between branch points with `y` continued along each segment.

use super::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::quadrature::{tanh_sinh, QuadOptions};
use crate::siegel::SiegelPoint;

/// Level-to-level tolerance of each period integral.
pub const PERIOD_QUADRATURE_TOLERANCE: f64 = 1e-12;
/// Halving the node count may change no entry of `Z` by more than this.
pub const PERIOD_CONVERGENCE_TOLERANCE: f64 = 1e-8;
/// `|Z - Z^T|` bound, relative to `max(1, |Z|)`.
pub const RIEMANN_SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Raw periods of the basis `x^k dx / y`, `k = 0..g-1`.
#[derive(Clone, Debug)]
pub struct Periods {
    /// `a[(k, j)] = int_{a_j} x^k dx / y`
    pub a: CMatrix,
    pub b: CMatrix,
    /// Normalized period matrix `A^-1 B`.
    pub z: SiegelPoint,
}

fn quad_options() -> QuadOptions {
    QuadOptions {
        max_level: 12,
        ..QuadOptions::with_rel_tol(PERIOD_QUADRATURE_TOLERANCE)
    }
}

/// `i^-p`
fn phase(p: usize) -> C64 {
    match p % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// `int x^k / sqrt|P|` over `(b_m, b_{m+1})`, `m` 0-based, for `k < g`;
/// returns the converged values and those at half the node count.
fn interval_integrals(b: &[f64], m: usize, g: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = (b[m], b[m + 1]);
    let est = tanh_sinh(lo, hi, &quad_options(), |x, da, db| {
        let mut p = da * db;
        for (k, &bk) in b.iter().enumerate() {
            if k != m && k != m + 1 {
                p *= (x - bk).abs();
            }
        }
        let s = 1.0 / p.sqrt();
        let mut out = Vec::with_capacity(g);
        let mut xp = 1.0;
        for _ in 0..g {
            out.push(xp * s);
            xp *= x;
        }
        out
    })?;
    Ok((est.value, est.previous))
}

fn assemble_real(b: &[f64], g: usize, k_vals: &[Vec<f64>]) -> (CMatrix, CMatrix) {
    let n = b.len();
    // J_m for 1-based m
    let j = |m: usize, k: usize| phase(n - m) * k_vals[m - 1][k];
    let mut a = CMatrix::zeros(g, g);
    let mut bm = CMatrix::zeros(g, g);
    for k in 0..g {
        for col in 1..=g {
            a[(k, col - 1)] = j(2 * col - 1, k) * -2.0;
            let mut s = C64::new(0.0, 0.0);
            for l in col..=g {
                s += j(2 * l, k);
            }
            bm[(k, col - 1)] = s * -2.0;
        }
    }
    (a, bm)
}

fn normalize(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| Error::RiemannRelationViolation("a-period matrix is singular".into()))
}

/// Checks the Riemann relations and returns the symmetrized point.
fn riemann_checked(z: CMatrix) -> Result<SiegelPoint> {
    let scale = z.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    let asym = (&z - z.transpose()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if asym > RIEMANN_SYMMETRY_TOLERANCE * scale {
        return Err(Error::RiemannRelationViolation(format!("Z - Z^T has entry {asym:e}")));
    }
    let sym = (&z + z.transpose()) * C64::new(0.5, 0.0);
    let x = sym.map(|v| v.re);
    let y = sym.map(|v| v.im);
    SiegelPoint::from_matrices(x, y).map_err(|e| match e {
        Error::NotPositiveDefinite { min_eigenvalue, .. } => Error::RiemannRelationViolation(format!(
            "Im Z is not positive definite (smallest eigenvalue {min_eigenvalue:e})"
        )),
        other => other,
    })
}

fn check_convergence(z: &CMatrix, z_half: &CMatrix) -> Result<()> {
    let diff = (z - z_half).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if diff >= PERIOD_CONVERGENCE_TOLERANCE {
        return Err(Error::QuadratureNonConvergence(format!(
            "period matrix changes by {diff:e} when the node count is halved"
        )));
    }
    Ok(())
}

fn real_periods(curve: &HyperellipticCurve, b: &[f64]) -> Result<Periods> {
    let g = curve.genus();
    let mut full = Vec::with_capacity(2 * g);
    let mut half = Vec::with_capacity(2 * g);
    for m in 0..2 * g {
        let (v, p) = interval_integrals(b, m, g)?;
        full.push(v);
        half.push(p);
    }
    let (a, bm) = assemble_real(b, g, &full);
    let z = normalize(&a, &bm)?;
    let (a_half, b_half) = assemble_real(b, g, &half);
    check_convergence(&z, &normalize(&a_half, &b_half)?)?;
    let point = riemann_checked(z)?;
    Ok(Periods { a, b: bm, z: point })
}

/// `sqrt` of `w` continued along a segment whose values stay in the
/// half plane around `mid`.
fn rotated_sqrt(w: C64, rot: C64, rot_sqrt: C64) -> C64 {
    (w * rot).sqrt() / rot_sqrt
}

/// `int dx / y` along the straight segment from `points[p]` to `points[q]`,
/// with `y` continued along the segment; also the half-node-count value.
fn segment_integral(points: &[C64], p: usize, q: usize) -> Result<(C64, C64)> {
    let (ea, eb) = (points[p], points[q]);
    let len = (eb - ea).norm();
    let dir = (eb - ea) / len;
    let mid = (ea + eb) * 0.5;
    let rotations: Vec<(C64, C64)> = points
        .iter()
        .map(|&e| {
            let m = mid - e;
            let rot = if m.norm() > 0.0 {
                m.conj() / m.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            (rot, rot.sqrt())
        })
        .collect();
    let sqrt_dir = dir.sqrt();
    let sqrt_neg_dir = (-dir).sqrt();
    let est = tanh_sinh(0.0, len, &quad_options(), |t, da, db| {
        let x = ea + dir * t;
        let mut y = sqrt_dir * da.sqrt() * sqrt_neg_dir * db.sqrt();
        for (k, &e) in points.iter().enumerate() {
            if k != p && k != q {
                let (rot, rs) = rotations[k];
                y *= rotated_sqrt(x - e, rot, rs);
            }
        }
        dir / y
    })?;
    Ok((est.value, est.previous))
}

/// Distance from `c` to the segment `[a, b]`.
fn segment_distance(a: C64, b: C64, c: C64) -> f64 {
    let d = b - a;
    let t = (((c - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (a + d * t - c).norm()
}

fn complex_genus_one(curve: &HyperellipticCurve) -> Result<Periods> {
    let pts = curve.points();
    let n = pts.len();
    // base point and two partners whose segments stay clear of the other
    // branch points and of each other
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for base in 0..n {
        for q1 in 0..n {
            for q2 in q1 + 1..n {
                if q1 == base || q2 == base {
                    continue;
                }
                let mut clearance = f64::INFINITY;
                for k in 0..n {
                    if k != base && k != q1 {
                        clearance = clearance.min(segment_distance(pts[base], pts[q1], pts[k]));
                    }
                    if k != base && k != q2 {
                        clearance = clearance.min(segment_distance(pts[base], pts[q2], pts[k]));
                    }
                }
                if best.is_none_or(|(c, ..)| clearance > c) {
                    best = Some((clearance, base, q1, q2));
                }
            }
        }
    }
    let (_, base, q1, q2) = best.ok_or_else(|| Error::Internal("no segment pair".into()))?;
    let (w1, w1_half) = segment_integral(pts, base, q1)?;
    let (w2, w2_half) = segment_integral(pts, base, q2)?;
    let (w1, w2, w1_half, w2_half) = (w1 * 2.0, w2 * 2.0, w1_half * 2.0, w2_half * 2.0);
    let mut sign = 1.0;
    if (w2 / w1).im < 0.0 {
        sign = -1.0;
    }
    let z = CMatrix::from_element(1, 1, w2 / w1 * sign);
    let z_half = CMatrix::from_element(1, 1, w2_half / w1_half * sign);
    check_convergence(&z, &z_half)?;
    let point = riemann_checked(z)?;
    Ok(Periods {
        a: CMatrix::from_element(1, 1, w1),
        b: CMatrix::from_element(1, 1, w2 * sign),
        z: point,
    })
}

/// Raw and normalized periods, after the convergence and Riemann checks.
pub fn periods(curve: &HyperellipticCurve) -> Result<Periods> {
    match curve.real_points() {
        Some(b) => real_periods(curve, &b),
        None => complex_genus_one(curve),
    }
}

/// Normalized period matrix `Z = A^-1 B` of the canonical basis.
pub fn period_matrix(curve: &HyperellipticCurve) -> Result<SiegelPoint> {
    Ok(periods(curve)?.z)
}

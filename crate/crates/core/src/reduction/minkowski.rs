//! Minkowski reduction of positive definite quadratic forms under
//! `GL(n, Z)`, `Y -> U^T Y U`.
//!
//! Orders up to [`EXACT_ORDER_LIMIT`] are reduced exactly by the greedy
//! successive-minimum construction: `b_k` minimizes `Q(v)` over all integer
//! `v` such that `(b_1, .., b_{k-1}, v)` extends to a basis of `Z^n`. Short
//! vectors come from Fincke-Pohst enumeration. Larger orders fall back to
//! sorting plus pairwise size reduction and are flagged approximate.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{combinations, gcd, int_det};
use crate::siegel::RealSymMatrix;

pub const EXACT_ORDER_LIMIT: usize = 4;
const MAX_HEURISTIC_PASSES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiReduction {
    pub reduced: RealSymMatrix,
    /// Unimodular integer matrix `U` with `reduced = U^T Y U`.
    pub transform: DMatrix<f64>,
    /// Number of elementary basis changes applied.
    pub word_length: usize,
    /// True when the order exceeded the exact-search limit.
    pub approximate: bool,
}

/// All nonzero integer vectors with `x^T q x <= bound`, one per `+-x` pair
/// (last nonzero entry positive), together with their norms.
pub fn short_vectors(q: &DMatrix<f64>, bound: f64) -> Result<Vec<(Vec<i64>, f64)>> {
    let n = q.nrows();
    let chol = Cholesky::new(q.clone()).ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: f64::NAN,
        max_eigenvalue: f64::NAN,
    })?;
    let r = chol.l().transpose();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)] * r[(i, i)]).collect();
    let mu = DMatrix::from_fn(n, n, |i, j| if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 });
    let cap = bound * (1.0 + 1e-12) + 1e-300;

    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    enumerate(n - 1, &mut x, cap, &diag, &mu, q, &mut out);
    Ok(out)
}

fn enumerate(
    i: usize,
    x: &mut [i64],
    rem: f64,
    diag: &[f64],
    mu: &DMatrix<f64>,
    q: &DMatrix<f64>,
    out: &mut Vec<(Vec<i64>, f64)>,
) {
    let n = x.len();
    let center: f64 = -(i + 1..n).map(|j| mu[(i, j)] * x[j] as f64).sum::<f64>();
    let width = (rem.max(0.0) / diag[i]).sqrt();
    let lo = (center - width).ceil() as i64;
    let hi = (center + width).floor() as i64;
    for xi in lo..=hi {
        let t = diag[i] * (xi as f64 - center).powi(2);
        if t > rem {
            continue;
        }
        x[i] = xi;
        if i == 0 {
            if let Some(first) = x.iter().rev().find(|&&v| v != 0) {
                // keep the representative whose last nonzero entry is positive
                if *first > 0 {
                    let v = x.to_vec();
                    let norm = quad_form(q, &v);
                    out.push((v, norm));
                }
            }
        } else {
            enumerate(i - 1, x, rem - t, diag, mu, q, out);
        }
    }
    x[i] = 0;
}

pub fn quad_form(q: &DMatrix<f64>, v: &[i64]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        for j in 0..n {
            s += q[(i, j)] * (v[i] * v[j]) as f64;
        }
    }
    s
}

/// Whether the integer rows extend to a basis of `Z^n`: the gcd of all
/// maximal minors is 1.
pub fn extends_to_basis(rows: &[Vec<i64>]) -> bool {
    let k = rows.len();
    if k == 0 {
        return true;
    }
    let n = rows[0].len();
    let mut acc = 0i128;
    for cols in combinations(n, k) {
        let minor: Vec<Vec<i64>> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        acc = gcd(acc, int_det(&minor));
        if acc == 1 {
            return true;
        }
    }
    acc == 1
}

fn congruence(y: &DMatrix<f64>, u: &DMatrix<f64>) -> Result<RealSymMatrix> {
    let m = u.transpose() * y * u;
    RealSymMatrix::new((&m + m.transpose()) * 0.5)
}

/// Sorting plus pairwise size reduction on the columns of `u`, with `w`
/// tracking `u^T y u`.
fn pairwise_reduce(y: &DMatrix<f64>, u: &mut DMatrix<f64>) -> usize {
    let n = y.nrows();
    let mut steps = 0;
    for _ in 0..MAX_HEURISTIC_PASSES {
        let mut changed = false;
        let w = u.transpose() * y * &*u;
        // selection sort by diagonal keeps column swaps explicit
        for i in 0..n {
            let mut best = i;
            for j in i + 1..n {
                let (a, b) = (w[(best, best)], w[(j, j)]);
                if b < a * (1.0 - 1e-14) {
                    best = j;
                }
            }
            if best != i {
                u.swap_columns(i, best);
                changed = true;
                steps += 1;
                break;
            }
        }
        if changed {
            continue;
        }
        'outer: for j in 1..n {
            for i in 0..j {
                let r = (w[(i, j)] / w[(i, i)]).round();
                if r != 0.0 && (2.0 * w[(i, j)].abs() > w[(i, i)] * (1.0 + 1e-12)) {
                    let ci = u.column(i).clone_owned();
                    let mut cj = u.column_mut(j);
                    cj -= ci * r;
                    changed = true;
                    steps += 1;
                    break 'outer;
                }
            }
        }
        if !changed {
            return steps;
        }
    }
    steps
}

/// Flips column signs so that `y_{k,k+1} >= 0`.
fn normalize_signs(y: &DMatrix<f64>, u: &mut DMatrix<f64>) -> usize {
    let n = y.nrows();
    let mut steps = 0;
    for k in 0..n.saturating_sub(1) {
        let w = u.transpose() * y * &*u;
        if w[(k, k + 1)] < 0.0 {
            let mut c = u.column_mut(k + 1);
            c.neg_mut();
            steps += 1;
        }
    }
    steps
}

pub fn minkowski_reduce(y: &RealSymMatrix) -> Result<MinkowskiReduction> {
    if !y.is_positive_definite() {
        let ev = y.eigenvalues();
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: ev[0],
            max_eigenvalue: ev[ev.len() - 1],
        });
    }
    let n = y.order();
    let ym = y.matrix();
    let mut u = DMatrix::<f64>::identity(n, n);
    let mut steps = pairwise_reduce(ym, &mut u);
    let approximate = n > EXACT_ORDER_LIMIT;

    if !approximate && n > 1 {
        let w = u.transpose() * ym * &u;
        let (basis, changed) = greedy_successive_minima(&w)?;
        if changed {
            let v = DMatrix::from_fn(n, n, |i, j| basis[j][i] as f64);
            u = &u * v;
            steps += 1;
        }
    }
    steps += normalize_signs(ym, &mut u);
    let reduced = congruence(ym, &u)?;
    Ok(MinkowskiReduction {
        reduced,
        transform: u,
        word_length: steps,
        approximate,
    })
}

/// Greedy successive minima of the form `w`; returns the new basis (as
/// integer vectors in the coordinates of `w`) and whether it differs from
/// the standard basis.
fn greedy_successive_minima(w: &DMatrix<f64>) -> Result<(Vec<Vec<i64>>, bool)> {
    let n = w.nrows();
    let mut basis: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut bound = (0..n).map(|i| w[(i, i)]).fold(0.0, f64::max);
    let mut vectors = short_vectors(w, bound)?;
    for _ in 0..n {
        loop {
            let mut best: Option<(f64, &Vec<i64>)> = None;
            for (v, norm) in &vectors {
                let mut rows = basis.clone();
                rows.push(v.clone());
                if !extends_to_basis(&rows) {
                    continue;
                }
                // ties: fewer/smaller coefficients first, then lexicographically
                // larger, so that e_1, e_2, .. win in their natural order
                let better = match best {
                    None => true,
                    Some((bn, bv)) => {
                        let l1 = |x: &Vec<i64>| x.iter().map(|c| c.abs()).sum::<i64>();
                        *norm < bn - 1e-13 * bn
                            || ((*norm - bn).abs() <= 1e-13 * bn
                                && (l1(v), std::cmp::Reverse(v)) < (l1(bv), std::cmp::Reverse(bv)))
                    }
                };
                if better {
                    best = Some((*norm, v));
                }
            }
            if let Some((_, v)) = best {
                basis.push(v.clone());
                break;
            }
            bound *= 2.0;
            vectors = short_vectors(w, bound)?;
        }
    }
    let changed = basis
        .iter()
        .enumerate()
        .any(|(k, v)| v.iter().enumerate().any(|(i, &c)| c != if i == k { 1 } else { 0 }));
    Ok((basis, changed))
}

/// Checks the Minkowski conditions within `tol`: `y_{k,k+1} >= 0` and
/// `Q(v) >= y_kk` for every `v` with `gcd(v_k, .., v_n) = 1`.
pub fn is_minkowski_reduced(y: &RealSymMatrix, tol: f64) -> Result<bool> {
    Ok(minkowski_margin(y, 1.0)? >= -tol)
}

/// Smallest slack among the Minkowski conditions, probing vectors whose
/// norm is within `window` of the relevant diagonal entry. Negative when a
/// condition is violated.
pub fn minkowski_margin(y: &RealSymMatrix, window: f64) -> Result<f64> {
    let n = y.order();
    let m = y.matrix();
    let mut margin = f64::INFINITY;
    for k in 0..n.saturating_sub(1) {
        margin = margin.min(m[(k, k + 1)]);
    }
    let top = (0..n).map(|k| m[(k, k)]).fold(0.0, f64::max);
    for (v, norm) in short_vectors(m, top + window)? {
        for k in 0..n {
            let unit = v.iter().enumerate().all(|(i, &c)| c == if i == k { 1 } else { 0 });
            if unit {
                continue;
            }
            let tail_gcd = v[k..].iter().fold(0i128, |acc, &c| gcd(acc, c as i128));
            if tail_gcd != 1 {
                continue;
            }
            margin = margin.min(norm - m[(k, k)]);
        }
    }
    Ok(margin)
}

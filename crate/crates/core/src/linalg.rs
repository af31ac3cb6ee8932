//! Small dense helpers shared by the numerical modules.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn cmax_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()))
}

pub fn complexify(re: &DMatrix<f64>, im: &DMatrix<f64>) -> CMatrix {
    re.zip_map(im, C64::new)
}

pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.im)
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::MalformedMatrix("empty matrix".into()));
    }
    for r in rows {
        if r.len() != n {
            return Err(Error::MalformedMatrix(format!(
                "expected {n}x{n}, found a row of length {}",
                r.len()
            )));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedMatrix("non-finite entry".into()));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn is_integral(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.fract() == 0.0 && v.abs() < 9.0e15)
}

/// Embeds `m` as the top-left block of an `n x n` matrix whose remaining
/// diagonal is `fill`.
pub fn pad(m: &DMatrix<f64>, n: usize, fill: f64) -> DMatrix<f64> {
    let k = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (k, k)).copy_from(m);
    for i in k..n {
        out[(i, i)] = fill;
    }
    out
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub fn int_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Completes a primitive integer vector that has an entry equal to +-1 to a
/// unimodular matrix whose first column is `v`.
pub fn complete_to_unimodular(v: &[i64]) -> Option<DMatrix<f64>> {
    let n = v.len();
    let pivot = v.iter().position(|&x| x.abs() == 1)?;
    let mut u = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        u[(i, pivot)] = v[i] as f64;
    }
    u.swap_columns(0, pivot);
    Some(u)
}

/// Inverse of an integer unimodular matrix, rounded back to integers.
pub fn unimodular_inverse(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = u
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("unimodular matrix is singular".into()))?;
    let rounded = inv.map(f64::round);
    if max_abs(&(&rounded - &inv)) > 1e-6 {
        return Err(Error::Internal("matrix is not unimodular".into()));
    }
    Ok(rounded)
}

/// Combinations of `k` indices out of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

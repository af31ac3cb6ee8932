//! Bergman metric of a hyperelliptic curve and the induced `L^2` product of
//! quadratic differentials.
//!
//! Area integrals over the curve are taken over both sheets of the
//! `x`-plane: `int_C F = 2 int_{x in C} F(x) dA`, where `dA` is the
//! Euclidean area of the `x`-plane, so that `(i/2) theta ^ conj(theta)` of
//! `theta = w(x) dx / y` becomes `|w|^2 / |P| dA`.

use super::curve::HyperellipticCurve;
use super::periods::periods;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::quadrature::{exp_sinh, tanh_sinh, QuadOptions, QuadValue};

/// Queries closer than this to a branch point are rejected.
pub const QUERY_EXCLUSION_RADIUS: f64 = 1e-6;
/// Level-to-level tolerance of the outer (`Im x`) integral.
pub const AREA_OUTER_TOLERANCE: f64 = 1e-11;
/// Level-to-level tolerance of the inner (`Re x`) integrals.
pub const AREA_INNER_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct BergmanReport {
    /// `rho_B` at the query point in the `x`-chart, i.e. the coefficient of
    /// `|dx|^2`.
    pub density_value: f64,
    /// Genus 1: `rho_B` in the flat chart `z` with `a`-period 1, equal to
    /// `1 / Im tau`.
    pub z_chart_density: Option<f64>,
    /// Gram matrix `G_ij = (i/2) int theta_i ^ conj(theta_j)` of
    /// `theta_i = x^(i-1) dx / y`.
    pub gram_matrix: CMatrix,
}

/// `G = A Im(Z) A^*` from the Riemann bilinear relations.
pub fn gram_matrix(curve: &HyperellipticCurve) -> Result<CMatrix> {
    let p = periods(curve)?;
    let im_z = p.z.y().matrix().map(|v| C64::new(v, 0.0));
    Ok(&p.a * im_z * p.a.adjoint())
}

fn require_real(curve: &HyperellipticCurve) -> Result<Vec<f64>> {
    curve
        .real_points()
        .ok_or_else(|| Error::Unsupported("area integrals are implemented for real branch points".into()))
}

fn inner_options() -> QuadOptions {
    QuadOptions {
        max_level: 12,
        ..QuadOptions::with_rel_tol(AREA_INNER_TOLERANCE)
    }
}

fn outer_options() -> QuadOptions {
    QuadOptions {
        max_level: 12,
        ..QuadOptions::with_rel_tol(AREA_OUTER_TOLERANCE)
    }
}

/// `|P(u + i v)|` given `u` and its exact distances to the branch points
/// listed in `exact`.
fn abs_poly(b: &[f64], u: f64, v: f64, exact: &[(usize, f64)]) -> f64 {
    let mut p = 1.0;
    for (k, &bk) in b.iter().enumerate() {
        let d = exact.iter().find(|(i, _)| *i == k).map_or((u - bk).abs(), |(_, d)| *d);
        p *= d.hypot(v);
    }
    p
}

/// Far cut-off of the real-direction tails, relative to `max(v, spread)`.
const TAIL_CUTOFF: f64 = 1e20;

/// `int_C h(x, |P(x)|) dA(x)` over the whole `x`-plane.
///
/// The outer integral runs over `v = |Im x|`, the inner one over `u = Re x`,
/// broken at the branch points and at the midpoints between them. Next to
/// a branch point `b` the inner variable is `s` with `u = b +- v sinh s`,
/// which turns the peak `1 / |x - b|` of width `v` into a smooth integrand.
fn plane_integral<T, H>(b: &[f64], h: H) -> Result<T>
where
    T: QuadValue,
    H: Fn(C64, f64) -> T,
{
    let n = b.len();
    let spread = (b[n - 1] - b[0]).max(f64::MIN_POSITIVE);
    let pair = |u: f64, v: f64, p: f64, jac: f64| -> T {
        let mut s = h(C64::new(u, v), p);
        s.axpy(1.0, &h(C64::new(u, -v), p));
        s.scaled(jac)
    };
    // integral over u between b[k] and b[k] + dir * reach
    let from_branch = |k: usize, dir: f64, reach: f64, other: Option<(usize, f64)>, v: f64, opts: &QuadOptions| {
        let s_max = (reach / v).asinh();
        tanh_sinh(0.0, s_max, opts, |s, _, _| {
            let d = v * s.sinh();
            let u = b[k] + dir * d;
            let exact: Vec<(usize, f64)> = match other {
                Some((j, len)) => vec![(k, d), (j, len - d)],
                None => vec![(k, d)],
            };
            pair(u, v, abs_poly(b, u, v, &exact), v * s.cosh())
        })
        .map(|e| e.value)
    };
    let inner = |v: f64| -> Result<T> {
        let opts = inner_options();
        let tail = TAIL_CUTOFF * v.max(spread);
        let mut total = from_branch(0, -1.0, tail, None, v, &opts)?;
        for m in 0..n - 1 {
            let len = b[m + 1] - b[m];
            total.axpy(1.0, &from_branch(m, 1.0, 0.5 * len, Some((m + 1, len)), v, &opts)?);
            total.axpy(1.0, &from_branch(m + 1, -1.0, 0.5 * len, Some((m, len)), v, &opts)?);
        }
        total.axpy(1.0, &from_branch(n - 1, 1.0, tail, None, v, &opts)?);
        Ok(total)
    };
    let mut failure: Option<Error> = None;
    let outer = exp_sinh(0.0, &outer_options(), |_, v| match inner(v) {
        Ok(t) => t,
        Err(e) => {
            let zero = h(C64::new(b[0], 1.0), 1.0).zero_like();
            failure.get_or_insert(e);
            zero
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer?.value)
}

fn monomials(x: C64, g: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(g);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..g {
        out.push(p);
        p *= x;
    }
    out
}

/// Gram matrix by direct area quadrature over both sheets; an independent
/// route to [`gram_matrix`].
pub fn gram_matrix_by_area(curve: &HyperellipticCurve) -> Result<CMatrix> {
    let b = require_real(curve)?;
    let g = curve.genus();
    let flat = plane_integral(&b, |x, p| {
        let w = monomials(x, g);
        let mut out = Vec::with_capacity(g * g);
        for i in 0..g {
            for j in 0..g {
                out.push(w[i] * w[j].conj() * (2.0 / p));
            }
        }
        out
    })?;
    Ok(CMatrix::from_fn(g, g, |i, j| flat[i * g + j]))
}

/// `conj(G^-1)`, the kernel with `rho = w^T K conj(w) / |P|`.
fn kernel(gram: &CMatrix) -> Result<CMatrix> {
    let inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("Gram matrix is singular".into()))?;
    Ok(inv.map(|v| v.conj()))
}

fn quadratic_form(k: &CMatrix, w: &[C64]) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..w.len() {
        for j in 0..w.len() {
            s += w[i] * k[(i, j)] * w[j].conj();
        }
    }
    s.re
}

/// `rho_B` in the `x`-chart at a real query point.
pub fn bergman_density(curve: &HyperellipticCurve, x_query: f64) -> Result<BergmanReport> {
    bergman_density_at(curve, C64::new(x_query, 0.0))
}

pub fn bergman_density_at(curve: &HyperellipticCurve, x_query: C64) -> Result<BergmanReport> {
    if curve.distance_to_branch_points(x_query) <= QUERY_EXCLUSION_RADIUS {
        return Err(Error::QueryTooCloseToBranchPoint { x: x_query.re });
    }
    let p = periods(curve)?;
    let im_z = p.z.y().matrix().map(|v| C64::new(v, 0.0));
    let gram = &p.a * im_z * p.a.adjoint();
    let g = curve.genus();
    let abs_p = curve.abs_poly(x_query);
    let density = quadratic_form(&kernel(&gram)?, &monomials(x_query, g)) / abs_p;
    let z_chart_density = (g == 1).then(|| density * abs_p * p.a[(0, 0)].norm_sqr());
    Ok(BergmanReport {
        density_value: density,
        z_chart_density,
        gram_matrix: gram,
    })
}

/// `int_C rho_B`, by area quadrature; equals the genus.
pub fn bergman_total_mass(curve: &HyperellipticCurve) -> Result<f64> {
    let b = require_real(curve)?;
    let k = kernel(&gram_matrix(curve)?)?;
    let g = curve.genus();
    plane_integral(&b, |x, p| 2.0 * quadratic_form(&k, &monomials(x, g)) / p)
}

/// Holomorphic quadratic differential. Genus 1: `c dz^2` in the flat chart
/// with `a`-period 1. Genus 2: `(c0 + c1 x + c2 x^2) dx^2 / y^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadDifferential {
    genus: usize,
    coefficients: Vec<C64>,
}

impl QuadDifferential {
    pub fn new(genus: usize, coefficients: Vec<C64>) -> Result<Self> {
        let expected = match genus {
            1 => 1,
            2 => 3,
            _ => {
                return Err(Error::Unsupported(format!(
                    "quadratic differentials are implemented for genus 1 and 2, got {genus}"
                )))
            }
        };
        if coefficients.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "genus {genus} needs {expected} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self { genus, coefficients })
    }

    /// `dz^2` on a torus.
    pub fn dz_squared() -> Self {
        Self {
            genus: 1,
            coefficients: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }
}

/// `(w1, w2)_B = (i/2) int w1 conj(w2) / rho_B`, linear in `w1`. The
/// orientation is the one of the complex structure, so `(w, w)_B > 0`.
pub fn bergman_qd_product(curve: &HyperellipticCurve, w1: &QuadDifferential, w2: &QuadDifferential) -> Result<C64> {
    let g = curve.genus();
    if w1.genus != w2.genus {
        return Err(Error::GenusMismatch(w1.genus, w2.genus));
    }
    if w1.genus != g {
        return Err(Error::GenusMismatch(g, w1.genus));
    }
    if g > 2 {
        return Err(Error::Unsupported(format!("genus {g} > 2")));
    }
    let b = require_real(curve)?;
    let p = periods(curve)?;
    let im_z = p.z.y().matrix().map(|v| C64::new(v, 0.0));
    let k = kernel(&(&p.a * im_z * p.a.adjoint()))?;
    // coefficient polynomials of dx^2 / y^2
    let x_chart = |w: &QuadDifferential| -> Vec<C64> {
        if g == 1 {
            let a = p.a[(0, 0)];
            vec![w.coefficients[0] / (a * a)]
        } else {
            w.coefficients.clone()
        }
    };
    let (q1, q2) = (x_chart(w1), x_chart(w2));
    let eval = |q: &[C64], x: C64| q.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c);
    plane_integral(&b, |x, abs_p| {
        let rho = quadratic_form(&k, &monomials(x, g));
        eval(&q1, x) * eval(&q2, x).conj() * (2.0 / (abs_p * rho))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genus_two() -> HyperellipticCurve {
        HyperellipticCurve::new(vec![-1.0, 0.0, 1.0, 2.0, 3.5, 5.0]).unwrap()
    }

    #[test]
    fn torus_density_is_flat() {
        let c = HyperellipticCurve::new(vec![-1.0, 0.0, 1.5, 4.0]).unwrap();
        let tau = super::super::period_matrix(&c).unwrap().entry(0, 0);
        for x in [-3.0, -0.5, 0.7, 2.0, 10.0] {
            let r = bergman_density(&c, x).unwrap();
            assert!((r.z_chart_density.unwrap() - 1.0 / tau.im).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_routes_agree() {
        for c in [HyperellipticCurve::new(vec![-1.0, 0.0, 1.0]).unwrap(), genus_two()] {
            let a = gram_matrix(&c).unwrap();
            let b = gram_matrix_by_area(&c).unwrap();
            let scale = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let diff = (&a - &b).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            assert!(diff < 1e-9 * scale, "{diff:e}");
        }
    }

    #[test]
    fn query_near_branch_point_is_rejected() {
        let c = genus_two();
        assert_eq!(
            bergman_density(&c, 1.0 + 1e-7).unwrap_err().kind(),
            "QueryTooCloseToBranchPoint"
        );
        assert!(bergman_density(&c, 1.0 + 1e-5).unwrap().density_value > 0.0);
    }

    #[test]
    fn qd_product_is_hermitian() {
        let c = genus_two();
        let w1 = QuadDifferential::new(2, vec![C64::new(1.0, 0.5), C64::new(0.0, 0.0), C64::new(-0.3, 0.2)]).unwrap();
        let w2 = QuadDifferential::new(2, vec![C64::new(0.0, 1.0), C64::new(0.4, 0.0), C64::new(0.1, 0.0)]).unwrap();
        let p12 = bergman_qd_product(&c, &w1, &w2).unwrap();
        let p21 = bergman_qd_product(&c, &w2, &w1).unwrap();
        assert!((p12 - p21.conj()).norm() < 1e-9 * p12.norm().max(1.0));
        let p11 = bergman_qd_product(&c, &w1, &w1).unwrap();
        assert!(p11.re > 0.0 && p11.im.abs() < 1e-12 * p11.re);
        assert_eq!(
            bergman_qd_product(&c, &w1, &QuadDifferential::dz_squared())
                .unwrap_err()
                .kind(),
            "GenusMismatch"
        );
    }
}

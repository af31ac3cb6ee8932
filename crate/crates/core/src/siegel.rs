//! Points of the Siegel upper half space `h_g`, the symplectic group acting
//! on it, and the invariant distance.
//!
//! The metric is `ds^2 = tr(Y^-1 dZ Y^-1 dZbar)`, which restricts to the
//! Poincare metric `|dz|^2 / y^2` on `h_1`. Distances are evaluated in closed
//! form from the eigenvalues `rho_k` of the cross-ratio matrix
//! `R(Z1, Z2) = (Z1 - Z2)(Z1 - Z2bar)^-1 (Z1bar - Z2bar)(Z1bar - Z2)^-1`:
//!
//! ```text
//! d^2 = sum_k log^2((1 + sqrt(rho_k)) / (1 - sqrt(rho_k)))
//! ```

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, complexify, imag_part, max_abs, real_part, CMatrix, C64};

/// Largest symmetrization correction accepted by the constructors, relative
/// to `max(1, max |entry|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;
/// Positive definiteness requires `lambda_min > POSITIVITY_TOLERANCE * lambda_max`.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;
/// Absolute tolerance on the symplectic relations for real elements.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-10;

/// A real symmetric matrix, symmetrized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSymMatrix {
    entries: DMatrix<f64>,
    correction: f64,
}

impl RealSymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::MalformedMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedMatrix("non-finite entry".into()));
        }
        let sym = (&m + m.transpose()) * 0.5;
        let correction = max_abs(&(&sym - &m));
        if correction > SYMMETRY_TOLERANCE * max_abs(&m).max(1.0) {
            return Err(Error::NotSymmetric(correction));
        }
        Ok(Self {
            entries: sym,
            correction,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(linalg::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
            correction: 0.0,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
            correction: 0.0,
        }
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Size of the symmetrization applied on construction.
    pub fn correction(&self) -> f64 {
        self.correction
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_positive_definite(&self) -> bool {
        check_positive_definite(self).is_ok()
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        linalg::to_rows(&self.entries)
    }
}

fn check_positive_definite(m: &RealSymMatrix) -> Result<()> {
    let ev = m.eigenvalues();
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if hi <= 0.0 || lo <= POSITIVITY_TOLERANCE * hi {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lo,
            max_eigenvalue: hi,
        });
    }
    Ok(())
}

/// A point `Z = X + iY` of `h_g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SiegelPointJson", into = "SiegelPointJson")]
pub struct SiegelPoint {
    x: RealSymMatrix,
    y: RealSymMatrix,
}

impl SiegelPoint {
    pub fn new(x: RealSymMatrix, y: RealSymMatrix) -> Result<Self> {
        if x.order() != y.order() {
            return Err(Error::OrderMismatch(x.order(), y.order()));
        }
        check_positive_definite(&y)?;
        Ok(Self { x, y })
    }

    pub fn from_rows(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Self> {
        Self::new(RealSymMatrix::from_rows(x)?, RealSymMatrix::from_rows(y)?)
    }

    pub fn from_matrices(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        Self::new(RealSymMatrix::new(x)?, RealSymMatrix::new(y)?)
    }

    pub fn from_complex(z: &CMatrix) -> Result<Self> {
        Self::from_matrices(real_part(z), imag_part(z))
    }

    /// The point `z = x + iy` of the upper half plane `h_1`.
    pub fn upper_half_plane(x: f64, y: f64) -> Result<Self> {
        Self::from_matrices(DMatrix::from_element(1, 1, x), DMatrix::from_element(1, 1, y))
    }

    /// The base point `i I_g`.
    pub fn base_point(g: usize) -> Self {
        Self {
            x: RealSymMatrix::zeros(g),
            y: RealSymMatrix::identity(g),
        }
    }

    pub fn genus(&self) -> usize {
        self.x.order()
    }

    pub fn x(&self) -> &RealSymMatrix {
        &self.x
    }

    pub fn y(&self) -> &RealSymMatrix {
        &self.y
    }

    pub fn z(&self) -> CMatrix {
        complexify(self.x.matrix(), self.y.matrix())
    }

    /// Entry `z_ij` as a complex number.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        C64::new(self.x.get(i, j), self.y.get(i, j))
    }

    /// Pads `X` with zeros and `Y` with the identity up to `target` genus.
    pub fn padded(&self, target: usize) -> Result<Self> {
        if target < self.genus() {
            return Err(Error::GenusMismatch(self.genus(), target));
        }
        Ok(Self {
            x: RealSymMatrix {
                entries: linalg::pad(self.x.matrix(), target, 0.0),
                correction: self.x.correction,
            },
            y: RealSymMatrix {
                entries: linalg::pad(self.y.matrix(), target, 1.0),
                correction: self.y.correction,
            },
        })
    }

    /// Principal sub-block on the given (sorted, distinct) indices.
    pub fn sub_block(&self, idx: &[usize]) -> Result<Self> {
        let k = idx.len();
        let x = DMatrix::from_fn(k, k, |i, j| self.x.get(idx[i], idx[j]));
        let y = DMatrix::from_fn(k, k, |i, j| self.y.get(idx[i], idx[j]));
        Self::from_matrices(x, y)
    }

    /// Largest entrywise difference `max |z_ij - w_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.genus() != other.genus() {
            return f64::INFINITY;
        }
        max_abs(&(self.x.matrix() - other.x.matrix())).max(max_abs(&(self.y.matrix() - other.y.matrix())))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

/// JSON shape `{"g": int, "X": [[real]], "Y": [[real]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiegelPointJson {
    pub g: usize,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
}

impl TryFrom<SiegelPointJson> for SiegelPoint {
    type Error = Error;

    fn try_from(j: SiegelPointJson) -> Result<Self> {
        let p = SiegelPoint::from_rows(&j.x, &j.y)?;
        if p.genus() != j.g {
            return Err(Error::GenusMismatch(j.g, p.genus()));
        }
        Ok(p)
    }
}

impl From<SiegelPoint> for SiegelPointJson {
    fn from(p: SiegelPoint) -> Self {
        SiegelPointJson {
            g: p.genus(),
            x: p.x.to_rows(),
            y: p.y.to_rows(),
        }
    }
}

/// An element `M = (A B; C D)` of `Sp(2g, R)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymplecticJson", into = "SymplecticJson")]
pub struct SymplecticElement {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    integral: bool,
}

fn relation_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let g = a.nrows();
    let r1 = a.transpose() * c - c.transpose() * a;
    let r2 = b.transpose() * d - d.transpose() * b;
    let r3 = a.transpose() * d - c.transpose() * b - DMatrix::<f64>::identity(g, g);
    max_abs(&r1).max(max_abs(&r2)).max(max_abs(&r3))
}

impl SymplecticElement {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let g = a.nrows();
        for m in [&a, &b, &c, &d] {
            if m.nrows() != g || m.ncols() != g || g == 0 {
                return Err(Error::MalformedMatrix(
                    "symplectic blocks must be nonempty and of equal square size".into(),
                ));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::MalformedMatrix("non-finite entry".into()));
            }
        }
        let integral = [&a, &b, &c, &d].iter().all(|m| linalg::is_integral(m));
        let residual = relation_residual(&a, &b, &c, &d);
        let ok = if integral {
            residual == 0.0
        } else {
            residual <= SYMPLECTIC_TOLERANCE
        };
        if !ok {
            return Err(Error::NotSymplectic(residual));
        }
        Ok(Self { a, b, c, d, integral })
    }

    pub fn from_rows(a: &[Vec<f64>], b: &[Vec<f64>], c: &[Vec<f64>], d: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            linalg::from_rows(a)?,
            linalg::from_rows(b)?,
            linalg::from_rows(c)?,
            linalg::from_rows(d)?,
        )
    }

    fn from_blocks_unchecked(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Self {
        let integral = [&a, &b, &c, &d].iter().all(|m| linalg::is_integral(m));
        Self { a, b, c, d, integral }
    }

    pub fn identity(g: usize) -> Self {
        let i = DMatrix::identity(g, g);
        let z = DMatrix::zeros(g, g);
        Self::from_blocks_unchecked(i.clone(), z.clone(), z, i)
    }

    /// The standard element `J = (0 -I; I 0)`, acting as `Z -> -Z^-1`.
    pub fn standard_j(g: usize) -> Self {
        let i = DMatrix::<f64>::identity(g, g);
        let z = DMatrix::zeros(g, g);
        Self::from_blocks_unchecked(z.clone(), -i.clone(), i, z)
    }

    /// Translation `Z -> Z + S` for a symmetric `S`.
    pub fn translation(s: &DMatrix<f64>) -> Result<Self> {
        let s = RealSymMatrix::new(s.clone())?;
        let g = s.order();
        let i = DMatrix::identity(g, g);
        Ok(Self::from_blocks_unchecked(
            i.clone(),
            s.matrix().clone(),
            DMatrix::zeros(g, g),
            i,
        ))
    }

    /// Change of basis `Z -> U^T Z U` for invertible `U`.
    pub fn rotation(u: &DMatrix<f64>) -> Result<Self> {
        let g = u.nrows();
        let inv = if linalg::is_integral(u) {
            linalg::unimodular_inverse(u)?
        } else {
            u.clone()
                .try_inverse()
                .ok_or_else(|| Error::MalformedMatrix("rotation matrix is singular".into()))?
        };
        Ok(Self::from_blocks_unchecked(
            u.transpose(),
            DMatrix::zeros(g, g),
            DMatrix::zeros(g, g),
            inv,
        ))
    }

    /// Inversion `z_kk -> -1/z_kk` in coordinate `k`, the embedded `(0 -1; 1 0)`.
    pub fn partial_inversion(g: usize, k: usize) -> Self {
        let mut a = DMatrix::<f64>::identity(g, g);
        let mut b = DMatrix::zeros(g, g);
        let mut c = DMatrix::zeros(g, g);
        a[(k, k)] = 0.0;
        b[(k, k)] = -1.0;
        c[(k, k)] = 1.0;
        let d = a.clone();
        Self::from_blocks_unchecked(a, b, c, d)
    }

    pub fn genus(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn residual(&self) -> f64 {
        relation_residual(&self.a, &self.b, &self.c, &self.d)
    }

    /// The full `2g x 2g` matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let g = self.genus();
        let mut m = DMatrix::zeros(2 * g, 2 * g);
        m.view_mut((0, 0), (g, g)).copy_from(&self.a);
        m.view_mut((0, g), (g, g)).copy_from(&self.b);
        m.view_mut((g, 0), (g, g)).copy_from(&self.c);
        m.view_mut((g, g), (g, g)).copy_from(&self.d);
        m
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.genus() != other.genus() {
            return Err(Error::GenusMismatch(self.genus(), other.genus()));
        }
        Ok(Self::from_blocks_unchecked(
            &self.a * &other.a + &self.b * &other.c,
            &self.a * &other.b + &self.b * &other.d,
            &self.c * &other.a + &self.d * &other.c,
            &self.c * &other.b + &self.d * &other.d,
        ))
    }

    pub fn inverse(&self) -> Self {
        Self::from_blocks_unchecked(
            self.d.transpose(),
            -self.b.transpose(),
            -self.c.transpose(),
            self.a.transpose(),
        )
    }

    /// The automorphy factor `CZ + D`.
    pub fn cocycle(&self, z: &SiegelPoint) -> Result<CMatrix> {
        if self.genus() != z.genus() {
            return Err(Error::GenusMismatch(self.genus(), z.genus()));
        }
        let zc = z.z();
        Ok(self.c.map(C64::from) * zc + self.d.map(C64::from))
    }

    pub fn act(&self, z: &SiegelPoint) -> Result<SiegelPoint> {
        sp_action(self, z)
    }

    pub fn embed(&self, target_genus: usize) -> Result<Self> {
        sp_embed(self, target_genus)
    }

    /// Exact equality up to the center `+-I` (both act identically on `h_g`).
    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        let m = self.to_matrix();
        let n = other.to_matrix();
        m == n || m == -n
    }
}

/// JSON shape `{"g": int, "A": [[real]], "B": .., "C": .., "D": ..}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymplecticJson {
    pub g: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
}

impl TryFrom<SymplecticJson> for SymplecticElement {
    type Error = Error;

    fn try_from(j: SymplecticJson) -> Result<Self> {
        let m = SymplecticElement::from_rows(&j.a, &j.b, &j.c, &j.d)?;
        if m.genus() != j.g {
            return Err(Error::GenusMismatch(j.g, m.genus()));
        }
        Ok(m)
    }
}

impl From<SymplecticElement> for SymplecticJson {
    fn from(m: SymplecticElement) -> Self {
        SymplecticJson {
            g: m.genus(),
            a: linalg::to_rows(&m.a),
            b: linalg::to_rows(&m.b),
            c: linalg::to_rows(&m.c),
            d: linalg::to_rows(&m.d),
        }
    }
}

/// `Z -> (AZ + B)(CZ + D)^-1`.
pub fn sp_action(m: &SymplecticElement, z: &SiegelPoint) -> Result<SiegelPoint> {
    let den = m.cocycle(z)?;
    let zc = z.z();
    let num = m.a.map(C64::from) * &zc + m.b.map(C64::from);
    let inv = den.clone().try_inverse().ok_or(Error::SingularDenominator)?;
    let cond = linalg::cmax_abs(&den) * linalg::cmax_abs(&inv) * z.genus() as f64;
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::SingularDenominator);
    }
    SiegelPoint::from_complex(&(num * inv))
}

/// Pads `(A B; C D)` to `target_genus` with identity blocks on `A`, `D` and
/// zero blocks on `B`, `C`.
pub fn sp_embed(m: &SymplecticElement, target_genus: usize) -> Result<SymplecticElement> {
    if target_genus < m.genus() {
        return Err(Error::GenusMismatch(m.genus(), target_genus));
    }
    Ok(SymplecticElement {
        a: linalg::pad(&m.a, target_genus, 1.0),
        b: linalg::pad(&m.b, target_genus, 0.0),
        c: linalg::pad(&m.c, target_genus, 0.0),
        d: linalg::pad(&m.d, target_genus, 1.0),
        integral: m.integral,
    })
}

/// Cayley image `K = (W - iI)(W + iI)^-1` of `Z1` after moving `Z2` to `iI`.
/// `K` is complex symmetric and `R(Z1, Z2)` is similar to the Hermitian
/// `K K^*`, so the cross-ratio eigenvalues are the squared singular values
/// of `K`.
fn cayley_after_base_change(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<CMatrix> {
    if z1.genus() != z2.genus() {
        return Err(Error::GenusMismatch(z1.genus(), z2.genus()));
    }
    let g = z1.genus();
    let chol = Cholesky::new(z2.y().matrix().clone()).ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: f64::NAN,
        max_eigenvalue: f64::NAN,
    })?;
    let l_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(g, g))
        .ok_or_else(|| Error::Internal("Cholesky factor is singular".into()))?;
    let l_inv_c = l_inv.map(C64::from);
    let shifted = z1.z() - z2.x().matrix().map(C64::from);
    let w = &l_inv_c * shifted * l_inv_c.transpose();
    let i_eye = CMatrix::identity(g, g) * C64::new(0.0, 1.0);
    let den = (&w + &i_eye)
        .try_inverse()
        .ok_or_else(|| Error::Internal("W + iI is singular".into()))?;
    Ok((w - i_eye) * den)
}

/// Square roots `sqrt(rho_k)` of the cross-ratio eigenvalues, ascending.
pub fn cross_ratio_roots(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<Vec<f64>> {
    let k = cayley_after_base_change(z1, z2)?;
    let mut sv: Vec<f64> = k.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    if let Some(&top) = sv.last() {
        if top.is_nan() || top >= 1.0 {
            return Err(Error::Internal(format!("cross-ratio eigenvalue {top} outside [0, 1)")));
        }
    }
    Ok(sv)
}

/// Eigenvalues `rho_k` of the cross-ratio matrix, ascending, each in `[0, 1)`.
pub fn cross_ratio_eigenvalues(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<Vec<f64>> {
    Ok(cross_ratio_roots(z1, z2)?.into_iter().map(|s| s * s).collect())
}

/// The cross-ratio matrix evaluated directly from its defining product.
pub fn cross_ratio_matrix(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<CMatrix> {
    if z1.genus() != z2.genus() {
        return Err(Error::GenusMismatch(z1.genus(), z2.genus()));
    }
    let (a, b) = (z1.z(), z2.z());
    let (ac, bc) = (a.conjugate(), b.conjugate());
    let inv = |m: CMatrix| m.try_inverse().ok_or(Error::SingularDenominator);
    Ok((&a - &b) * inv(&a - &bc)? * (&ac - &bc) * inv(&ac - &b)?)
}

/// Invariant distance on `h_g`.
pub fn siegel_distance(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<f64> {
    let roots = cross_ratio_roots(z1, z2)?;
    Ok(roots.iter().map(|s| (2.0 * s.atanh()).powi(2)).sum::<f64>().sqrt())
}

/// Hyperbolic distance on the upper half plane, `acosh(1 + |z-w|^2 / (2 y_z y_w))`.
pub fn poincare_distance(z: C64, w: C64) -> f64 {
    (1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im)).acosh()
}

/// Integral generators of `Sp(2g, Z)`: unit translations, elementary
/// rotations and the coordinate inversions.
pub fn integral_generators(g: usize) -> Vec<SymplecticElement> {
    let mut gens = Vec::new();
    for i in 0..g {
        for j in i..g {
            let mut s = DMatrix::<f64>::zeros(g, g);
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
            gens.push(SymplecticElement::translation(&s).expect("symmetric"));
        }
    }
    for i in 0..g {
        for j in 0..g {
            if i != j {
                let mut u = DMatrix::<f64>::identity(g, g);
                u[(i, j)] = 1.0;
                gens.push(SymplecticElement::rotation(&u).expect("unimodular"));
            }
        }
    }
    for k in 0..g {
        gens.push(SymplecticElement::partial_inversion(g, k));
    }
    gens
}

/// A random word of the given length in the integral generators and their
/// inverses.
pub fn random_integral_word<R: Rng + ?Sized>(g: usize, len: usize, rng: &mut R) -> SymplecticElement {
    let gens = integral_generators(g);
    let mut m = SymplecticElement::identity(g);
    for _ in 0..len {
        let k = rng.random_range(0..gens.len());
        let step = if rng.random_bool(0.5) {
            gens[k].clone()
        } else {
            gens[k].inverse()
        };
        m = step.compose(&m).expect("same genus");
    }
    m
}

//! Siegel reduction of `Z` to the fundamental domain of `Sp(2g, Z)`.
//!
//! The domain is cut out by three families of conditions:
//!
//! 1. `Y` is Minkowski reduced (including `y_{k,k+1} >= 0`),
//! 2. `|x_ij| <= 1/2`,
//! 3. `|det(CZ + D)| >= 1` for every element of a finite dilation set.
//!
//! The dilation set contains the rank-one conditions `|v^T Z v + e| >= 1`
//! and the full-rank conditions `|det(Z + S)| >= 1` with all coefficients in
//! `{-1, 0, 1}`. For `g = 2` this contains Gottschling's nineteen boundary
//! conditions, so the domain is the true fundamental domain. For `g = 3` the
//! set is a heuristic superset and results are best effort.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::minkowski::{minkowski_margin, minkowski_reduce};
use crate::error::{Error, Result};
use crate::linalg::complete_to_unimodular;
use crate::siegel::{sp_embed, SiegelPoint, SymplecticElement};

pub const MAX_ITERATIONS: usize = 10_000;
/// Tolerance of the membership predicate.
pub const DOMAIN_TOLERANCE: f64 = 1e-9;
pub const MAX_SUPPORTED_GENUS: usize = 3;
/// Dilations fire only when `|det(CZ + D)|` falls below `1 - DILATION_SLACK`,
/// so boundary points never cycle.
const DILATION_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SiegelReduction {
    pub reduced: SiegelPoint,
    /// Integral element with `transform . input == reduced`.
    pub transform: SymplecticElement,
    /// Number of generator applications (rotations, translations, dilations).
    pub word_length: usize,
}

fn check_genus(g: usize) -> Result<()> {
    if g == 0 || g > MAX_SUPPORTED_GENUS {
        return Err(Error::Unsupported(format!(
            "fundamental domain is implemented for genus 1..={MAX_SUPPORTED_GENUS}, got {g}"
        )));
    }
    Ok(())
}

fn unit_coefficient_vectors(g: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let total = 3usize.pow(g as u32);
    for code in 0..total {
        let mut v = Vec::with_capacity(g);
        let mut c = code;
        for _ in 0..g {
            v.push((c % 3) as i64 - 1);
            c /= 3;
        }
        // one representative of +-v
        match v.iter().find(|&&x| x != 0) {
            Some(&first) if first > 0 => out.push(v),
            _ => {}
        }
    }
    out
}

fn symmetric_unit_matrices(g: usize) -> Vec<DMatrix<f64>> {
    let slots: Vec<(usize, usize)> = (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).collect();
    let total = 3usize.pow(slots.len() as u32);
    (0..total)
        .map(|code| {
            let mut s = DMatrix::zeros(g, g);
            let mut c = code;
            for &(i, j) in &slots {
                let v = (c % 3) as f64 - 1.0;
                c /= 3;
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
            s
        })
        .collect()
}

/// `(0 -I; I S)`, with cocycle `det(Z + S)`.
fn shifted_inversion(s: &DMatrix<f64>) -> SymplecticElement {
    let t = SymplecticElement::translation(s).expect("symmetric");
    SymplecticElement::standard_j(s.nrows())
        .compose(&t)
        .expect("same genus")
}

fn build_dilations(g: usize) -> Vec<SymplecticElement> {
    let mut set = Vec::new();
    // rank one: J_1 . T_{e E_11} . R_U with first column of U equal to v
    for v in unit_coefficient_vectors(g) {
        let u = complete_to_unimodular(&v).expect("entries are in {-1,0,1}");
        let rot = SymplecticElement::rotation(&u).expect("unimodular");
        for e in [-1.0, 0.0, 1.0] {
            let mut s = DMatrix::zeros(g, g);
            s[(0, 0)] = e;
            let m = SymplecticElement::partial_inversion(g, 0)
                .compose(&SymplecticElement::translation(&s).expect("symmetric"))
                .and_then(|m| m.compose(&rot))
                .expect("same genus");
            set.push(m);
        }
    }
    if g >= 2 {
        for s in symmetric_unit_matrices(g) {
            set.push(shifted_inversion(&s));
        }
    }
    if g == 3 {
        // rank two on each coordinate pair
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let k = 3 - i - j;
            let mut p = DMatrix::<f64>::zeros(3, 3);
            p[(i, 0)] = 1.0;
            p[(j, 1)] = 1.0;
            p[(k, 2)] = 1.0;
            let rot = SymplecticElement::rotation(&p).expect("permutation");
            for s in symmetric_unit_matrices(2) {
                let m = sp_embed(&shifted_inversion(&s), 3)
                    .expect("target genus is larger")
                    .compose(&rot)
                    .expect("same genus");
                set.push(m);
            }
        }
    }
    set
}

/// The finite dilation set for genus `g` (1..=3).
pub fn dilation_set(g: usize) -> Result<&'static [SymplecticElement]> {
    static SETS: OnceLock<Vec<Vec<SymplecticElement>>> = OnceLock::new();
    check_genus(g)?;
    let sets = SETS.get_or_init(|| (1..=MAX_SUPPORTED_GENUS).map(build_dilations).collect());
    Ok(&sets[g - 1])
}

/// Smallest `|det(CZ + D)|` over the dilation set and the element reaching it.
fn worst_dilation(z: &SiegelPoint) -> Result<(f64, &'static SymplecticElement)> {
    let set = dilation_set(z.genus())?;
    let mut best: Option<(f64, &SymplecticElement)> = None;
    for m in set {
        let det = m.cocycle(z)?.determinant().norm();
        if best.is_none_or(|(b, _)| det < b) {
            best = Some((det, m));
        }
    }
    best.ok_or_else(|| Error::Internal("empty dilation set".into()))
}

fn round_x(z: &SiegelPoint) -> DMatrix<f64> {
    z.x().matrix().map(f64::round_ties_even)
}

/// Genus 1 representative on the boundary: `x = -1/2` is moved to `x = 1/2`
/// and the left half of the unit arc to the right half.
fn boundary_identifications(z: &SiegelPoint) -> Vec<SymplecticElement> {
    let w = z.entry(0, 0);
    let mut out = Vec::new();
    if w.re < 0.0 && w.norm() <= 1.0 + DOMAIN_TOLERANCE {
        out.push(SymplecticElement::standard_j(1));
    } else if w.re <= -0.5 + DOMAIN_TOLERANCE {
        out.push(SymplecticElement::translation(&DMatrix::from_element(1, 1, 1.0)).expect("symmetric"));
    }
    out
}

pub fn siegel_reduce(z: &SiegelPoint) -> Result<SiegelReduction> {
    let g = z.genus();
    check_genus(g)?;
    let mut current = z.clone();
    let mut total = SymplecticElement::identity(g);
    let mut words = 0;
    for _ in 0..MAX_ITERATIONS {
        let mink = minkowski_reduce(current.y())?;
        if mink.transform != DMatrix::identity(g, g) {
            let rot = SymplecticElement::rotation(&mink.transform)?;
            current = rot.act(&current)?;
            total = rot.compose(&total)?;
            words += 1;
        }
        let shift = round_x(&current);
        if shift.iter().any(|&v| v != 0.0) {
            let t = SymplecticElement::translation(&(-shift))?;
            current = t.act(&current)?;
            total = t.compose(&total)?;
            words += 1;
        }
        let (det, m) = worst_dilation(&current)?;
        if det < 1.0 - DILATION_SLACK {
            current = m.act(&current)?;
            total = m.compose(&total)?;
            words += 1;
            continue;
        }
        if g == 1 {
            for m in boundary_identifications(&current) {
                current = m.act(&current)?;
                total = m.compose(&total)?;
                words += 1;
            }
        }
        let reduced = total.act(z)?;
        return Ok(SiegelReduction {
            reduced,
            transform: total,
            word_length: words,
        });
    }
    Err(Error::IterationLimitExceeded(MAX_ITERATIONS))
}

/// Smallest slack over all domain conditions: `1/2 - |x_ij|`, the Minkowski
/// conditions and `|det(CZ + D)| - 1`. Negative outside the domain; close to
/// zero near a wall.
pub fn fundamental_domain_margin(z: &SiegelPoint) -> Result<f64> {
    check_genus(z.genus())?;
    let x_margin = z
        .x()
        .matrix()
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(0.5 - v.abs()));
    let (det, _) = worst_dilation(z)?;
    let y_margin = if z.y().is_positive_definite() {
        minkowski_margin(z.y(), 1.0)?
    } else {
        f64::NEG_INFINITY
    };
    Ok(x_margin.min(y_margin).min(det - 1.0))
}

pub fn in_fundamental_domain(z: &SiegelPoint) -> Result<bool> {
    Ok(fundamental_domain_margin(z)? >= -DOMAIN_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn h1(x: f64, y: f64) -> SiegelPoint {
        SiegelPoint::upper_half_plane(x, y).unwrap()
    }

    /// Brute force over SL(2, Z) words of length <= 6 in T, T^-1, S: the
    /// orbit point with the largest imaginary part and |x| <= 1/2.
    fn brute_force_h1(z: C64) -> C64 {
        let mut frontier = vec![z];
        let mut best = z;
        for _ in 0..6 {
            let mut next = Vec::new();
            for w in frontier {
                for im in [w + 1.0, w - 1.0, -1.0 / w] {
                    let better =
                        im.im > best.im + 1e-12 || ((im.im - best.im).abs() <= 1e-12 && im.re.abs() < best.re.abs());
                    if better && im.re.abs() <= 0.5 + 1e-12 {
                        best = im;
                    }
                    next.push(im);
                }
            }
            frontier = next;
        }
        best
    }

    #[test]
    fn already_reduced_point_is_fixed() {
        let z = h1(0.1, 2.0);
        let r = siegel_reduce(&z).unwrap();
        assert_eq!(r.reduced, z);
        assert_eq!(r.transform, SymplecticElement::identity(1));
        assert_eq!(r.word_length, 0);
    }

    #[test]
    fn inversion_then_translation() {
        let oracle = brute_force_h1(C64::new(0.3, 0.4));
        assert!((oracle - C64::new(-0.2, 1.6)).norm() < 1e-12);
        let r = siegel_reduce(&h1(0.3, 0.4)).unwrap();
        assert!((r.reduced.entry(0, 0) - oracle).norm() < 1e-12);
        assert!(r.transform.is_integral());
        assert_eq!(r.word_length, 2);
    }

    #[test]
    fn genus_one_boundary_representatives() {
        let s3 = 3f64.sqrt() / 2.0;
        let r = siegel_reduce(&h1(-0.5, s3)).unwrap();
        assert!((r.reduced.entry(0, 0) - C64::new(0.5, s3)).norm() < 1e-12);
        let r = siegel_reduce(&h1(-0.5, 2.0)).unwrap();
        assert!((r.reduced.entry(0, 0) - C64::new(0.5, 2.0)).norm() < 1e-12);
        let theta = 1.9f64;
        let r = siegel_reduce(&h1(theta.cos(), theta.sin())).unwrap();
        assert!((r.reduced.entry(0, 0) - C64::new(-theta.cos(), theta.sin())).norm() < 1e-12);
        let r = siegel_reduce(&h1(0.5, 2.0)).unwrap();
        assert_eq!(r.word_length, 0);
    }

    #[test]
    fn membership_examples() {
        for g in 1..=3 {
            assert!(in_fundamental_domain(&SiegelPoint::base_point(g)).unwrap());
        }
        assert!(!in_fundamental_domain(&h1(0.6, 2.0)).unwrap());
        assert!(!in_fundamental_domain(&h1(0.2, 0.5)).unwrap());
        assert_eq!(
            in_fundamental_domain(&SiegelPoint::base_point(4)).unwrap_err().kind(),
            "Unsupported"
        );
    }

    #[test]
    fn dilation_set_sizes() {
        assert_eq!(dilation_set(1).unwrap().len(), 3);
        assert_eq!(dilation_set(2).unwrap().len(), 4 * 3 + 27);
        for m in dilation_set(3).unwrap() {
            assert!(m.is_integral());
            assert_eq!(m.residual(), 0.0);
        }
    }

    #[test]
    fn gottschling_rank_one_conditions_are_present() {
        // |z11 + z22 - 2 z12 + e| for e = +-1 via v = (1, -1)
        let z =
            SiegelPoint::from_rows(&[vec![0.1, 0.05], vec![0.05, -0.2]], &[vec![1.1, 0.3], vec![0.3, 1.4]]).unwrap();
        let zz = z.z();
        for e in [-1.0, 1.0] {
            let target = (zz[(0, 0)] + zz[(1, 1)] - zz[(0, 1)] * 2.0 + e).norm();
            let found = dilation_set(2)
                .unwrap()
                .iter()
                .any(|m| (m.cocycle(&z).unwrap().determinant().norm() - target).abs() < 1e-12);
            assert!(found);
        }
    }
}

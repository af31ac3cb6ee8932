//! Degenerating families of hyperelliptic curves and the boundary
//! stratification.
//!
//! Pinching is realized by branch-point collision. For genus 2:
//!
//! ```text
//!   separating      * * *  <---- 4/eps ---->  * * *
//!                   the loop around one cluster of three branch points
//!                   lifts to a null-homologous curve; the limit is the
//!                   product of the two cluster curves (each with a branch
//!                   point at infinity)
//!
//!   non-separating  * * * *  *)(*
//!                   the loop around the colliding pair lifts to a
//!                   homologically nontrivial curve; the limit is the
//!                   genus-1 curve through the remaining branch points
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobian::{reduced_period_point, HyperellipticCurve};
use crate::siegel::{siegel_distance, SiegelPoint};
use crate::universal::StratumDescriptor;

pub const MIN_EPSILON: f64 = 1e-12;
/// Largest total genus of a family.
pub const MAX_FAMILY_GENUS: usize = 2;
/// Distance change per decade of `eps` below which the family is Finite.
pub const FINITE_DISTANCE_RATE: f64 = 0.05;
/// Fitted growth of `max Im Z_ii` per decade of `eps` for Divergent.
pub const DIVERGENT_DIAGONAL_RATE: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegenerationKind {
    #[serde(rename = "sep", alias = "separating")]
    Separating,
    #[serde(rename = "nonsep", alias = "nonseparating")]
    NonSeparating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Finite,
    Divergent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationFamily {
    kind: DegenerationKind,
    genera: Vec<usize>,
    epsilons: Vec<f64>,
    curves: Vec<HyperellipticCurve>,
}

fn cluster(centre: f64, genus: usize) -> Vec<f64> {
    let h = genus as i64;
    (-h..=h).map(|k| centre + k as f64).collect()
}

fn separating_points(genera: &[usize], eps: f64) -> Vec<f64> {
    // cluster i sits at (2 / eps) * (2 i - (k - 1)); for eps = 1 and two
    // genus-1 clusters this is [-3, -2, -1, 1, 2, 3]
    let k = genera.len() as f64;
    genera
        .iter()
        .enumerate()
        .flat_map(|(i, &g)| cluster(2.0 / eps * (2.0 * i as f64 - (k - 1.0)), g))
        .collect()
}

fn non_separating_points(genus: usize, eps: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..2 * genus).map(|k| k as f64 - 1.0).collect();
    let pinch = 2.0 * genus as f64 - 1.0;
    pts.push(pinch - eps);
    pts.push(pinch + eps);
    pts
}

/// Builds the family. `genera` lists the cluster genera for a separating
/// family (at least two, each at least 1) and the single total genus for a
/// non-separating one.
pub fn make_family(kind: DegenerationKind, genera: &[usize], epsilons: &[f64]) -> Result<DegenerationFamily> {
    let total: usize = genera.iter().sum();
    if total > MAX_FAMILY_GENUS {
        return Err(Error::Unsupported(format!(
            "families of total genus {total} > {MAX_FAMILY_GENUS}"
        )));
    }
    match kind {
        DegenerationKind::Separating if genera.len() < 2 || genera.contains(&0) => {
            return Err(Error::InvalidFamily(
                "a separating family needs at least two clusters of positive genus".into(),
            ))
        }
        DegenerationKind::NonSeparating if genera.len() != 1 || genera[0] == 0 => {
            return Err(Error::InvalidFamily(
                "a non-separating family takes its total genus".into(),
            ))
        }
        _ => {}
    }
    if epsilons.len() < 2 {
        return Err(Error::InvalidFamily("need at least two values of eps".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > MIN_EPSILON)) {
        return Err(Error::InvalidFamily(format!("eps = {e} is not above {MIN_EPSILON:e}")));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidFamily("eps must be strictly decreasing".into()));
    }
    let curves = epsilons
        .iter()
        .map(|&eps| {
            let pts = match kind {
                DegenerationKind::Separating => separating_points(genera, eps),
                DegenerationKind::NonSeparating => non_separating_points(genera[0], eps),
            };
            let sorted = pts.windows(2).all(|w| w[0] < w[1]);
            if !sorted {
                return Err(Error::InvalidFamily(format!("eps = {eps} makes the clusters overlap")));
            }
            HyperellipticCurve::new(pts)
                .map(|c| c.with_label(format!("eps={eps}")))
                .map_err(|e| Error::InvalidFamily(format!("eps = {eps}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegenerationFamily {
        kind,
        genera: genera.to_vec(),
        epsilons: epsilons.to_vec(),
        curves,
    })
}

impl DegenerationFamily {
    pub fn kind(&self) -> DegenerationKind {
        self.kind
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn curves(&self) -> &[HyperellipticCurve] {
        &self.curves
    }

    /// Curves of the limit: the clusters (each with a branch point at
    /// infinity) for a separating family, the normalization of the nodal
    /// curve for a non-separating one.
    pub fn limit_curves(&self) -> Result<Vec<HyperellipticCurve>> {
        match self.kind {
            DegenerationKind::Separating => self
                .genera
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    let centre = 2.0 * (2.0 * i as f64 - (self.genera.len() as f64 - 1.0));
                    HyperellipticCurve::new(cluster(centre, g))
                })
                .collect(),
            DegenerationKind::NonSeparating => {
                let g = self.genera[0];
                let pts: Vec<f64> = (0..2 * g).map(|k| k as f64 - 1.0).collect();
                if g == 1 {
                    Err(Error::Unsupported("the limit of a pinched torus is rational".into()))
                } else {
                    Ok(vec![HyperellipticCurve::new(pts)?])
                }
            }
        }
    }

    /// The stratum the family tends to.
    pub fn limit_stratum(&self) -> StratumDescriptor {
        match self.kind {
            DegenerationKind::Separating => StratumDescriptor::interior(self.genera.iter().sum()),
            DegenerationKind::NonSeparating => {
                StratumDescriptor::boundary((self.genera[0] > 1).then(|| self.genera[0] - 1).into_iter().collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub kind: DegenerationKind,
    pub epsilons: Vec<f64>,
    pub reduced_points: Vec<SiegelPoint>,
    pub offdiag_norms: Vec<f64>,
    pub im_diag_max: Vec<f64>,
    pub distance_to_first: Vec<f64>,
    pub classification: Classification,
}

fn offdiag_norm(z: &SiegelPoint) -> f64 {
    let g = z.genus();
    let mut m = 0.0f64;
    for i in 0..g {
        for j in 0..g {
            if i != j {
                m = m.max(z.entry(i, j).norm());
            }
        }
    }
    m
}

fn im_diag_max(z: &SiegelPoint) -> f64 {
    (0..z.genus()).fold(f64::NEG_INFINITY, |m, i| m.max(z.y().get(i, i)))
}

/// Least-squares slope of `ys` against `xs`.
fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Divergent: `distance_to_first` strictly increasing and the fitted
/// growth of `max Im Z_ii` at least [`DIVERGENT_DIAGONAL_RATE`] per decade.
/// Finite: `distance_to_first` changes by less than
/// [`FINITE_DISTANCE_RATE`] per decade over the last step. Anything else is
/// [`Error::Inconclusive`].
pub fn classify_trend(epsilons: &[f64], im_diag_max: &[f64], distance_to_first: &[f64]) -> Result<Classification> {
    let n = epsilons.len();
    if n < 2 {
        return Err(Error::Inconclusive("a trend needs at least two points".into()));
    }
    let decades: Vec<f64> = epsilons.iter().map(|e| -e.log10()).collect();
    let increasing = distance_to_first.windows(2).all(|w| w[1] > w[0]);
    let slope = fitted_slope(&decades, im_diag_max);
    if increasing && slope >= DIVERGENT_DIAGONAL_RATE {
        return Ok(Classification::Divergent);
    }
    let last_rate = (distance_to_first[n - 1] - distance_to_first[n - 2]).abs() / (decades[n - 1] - decades[n - 2]);
    if last_rate < FINITE_DISTANCE_RATE {
        return Ok(Classification::Finite);
    }
    Err(Error::Inconclusive(format!(
        "diagonal growth {slope:.3} per decade, final distance change {last_rate:.3} per decade"
    )))
}

/// Reduced period points along the family, computed concurrently and
/// reported in `eps` order.
pub fn neck_limit_probe(family: &DegenerationFamily) -> Result<DegenerationReport> {
    let reduced_points = family
        .curves
        .par_iter()
        .map(reduced_period_point)
        .collect::<Result<Vec<_>>>()?;
    let first = &reduced_points[0];
    let distance_to_first = reduced_points
        .iter()
        .map(|z| siegel_distance(first, z))
        .collect::<Result<Vec<_>>>()?;
    let offdiag_norms: Vec<f64> = reduced_points.iter().map(offdiag_norm).collect();
    let diag: Vec<f64> = reduced_points.iter().map(im_diag_max).collect();
    let classification = classify_trend(&family.epsilons, &diag, &distance_to_first)?;
    Ok(DegenerationReport {
        kind: family.kind,
        epsilons: family.epsilons.clone(),
        reduced_points,
        offdiag_norms,
        im_diag_max: diag,
        distance_to_first,
        classification,
    })
}

fn partitions_with_sum(n: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=max_part.min(n)).rev() {
        prefix.push(part);
        partitions_with_sum(n - part, part, prefix, out);
        prefix.pop();
    }
}

/// Strata of the boundary of `A_g` reached by pinching: every multiset
/// `{g_1, .., g_k}` with `g_i >= 1` and either `sum < g`, or `sum = g` and
/// `k >= 2`, followed by the cusp `{}`. Ordered by total genus, then
/// largest parts first. The interior `{g}` comes first when requested.
pub fn enumerate_boundary_strata(g: usize, include_interior: bool) -> Result<Vec<StratumDescriptor>> {
    if g == 0 {
        return Err(Error::InvalidConfig("genus must be at least 1".into()));
    }
    let mut out = Vec::new();
    if include_interior {
        out.push(StratumDescriptor::interior(g));
    }
    for total in 1..=g {
        let mut parts = Vec::new();
        partitions_with_sum(total, total, &mut Vec::new(), &mut parts);
        for p in parts {
            if total < g || p.len() >= 2 {
                out.push(StratumDescriptor::boundary(p));
            }
        }
    }
    out.push(StratumDescriptor::cusp());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    const GRID: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

    #[test]
    fn family_construction() {
        let f = make_family(DegenerationKind::Separating, &[1, 1], &[1.0, 0.5]).unwrap();
        assert_eq!(
            f.curves()[0].real_points().unwrap(),
            vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]
        );
        let f = make_family(DegenerationKind::NonSeparating, &[2], &GRID).unwrap();
        assert_eq!(f.curves()[3].real_points().unwrap()[4], 3.0 - 1e-4);
        for c in f.curves() {
            assert_eq!(c.genus(), 2);
        }
        let bad = make_family(DegenerationKind::NonSeparating, &[2], &[1e-2, 1e-2]);
        assert_eq!(bad.unwrap_err().kind(), "InvalidFamily");
        let bad = make_family(DegenerationKind::NonSeparating, &[2], &[1e-2, 1e-1]);
        assert_eq!(bad.unwrap_err().kind(), "InvalidFamily");
        let bad = make_family(DegenerationKind::Separating, &[2, 1], &GRID);
        assert_eq!(bad.unwrap_err().kind(), "Unsupported");
        let bad = make_family(DegenerationKind::Separating, &[1, 1], &[3.0, 2.0]);
        assert_eq!(bad.unwrap_err().kind(), "InvalidFamily");
    }

    #[test]
    fn classification_rules() {
        let eps = [1e-1, 1e-2, 1e-3];
        assert_eq!(
            classify_trend(&eps, &[1.0, 1.8, 2.6], &[0.0, 0.5, 0.8]).unwrap(),
            Classification::Divergent
        );
        assert_eq!(
            classify_trend(&eps, &[1.0, 1.0, 1.0], &[0.0, 0.01, 0.011]).unwrap(),
            Classification::Finite
        );
        assert_eq!(
            classify_trend(&eps, &[1.0, 1.1, 1.2], &[0.0, 0.1, 0.2])
                .unwrap_err()
                .kind(),
            "Inconclusive"
        );
    }

    #[test]
    fn strata_examples() {
        let show = |g| -> Vec<String> {
            enumerate_boundary_strata(g, false)
                .unwrap()
                .iter()
                .map(|s| s.to_string())
                .collect()
        };
        assert_eq!(show(1), ["Boundary({})"]);
        assert_eq!(show(2), ["Boundary({1})", "Boundary({1,1})", "Boundary({})"]);
        assert_eq!(
            show(3),
            [
                "Boundary({1})",
                "Boundary({2})",
                "Boundary({1,1})",
                "Boundary({2,1})",
                "Boundary({1,1,1})",
                "Boundary({})"
            ]
        );
        let with = enumerate_boundary_strata(2, true).unwrap();
        assert_eq!(with[0], StratumDescriptor::interior(2));
    }

    /// Every multiplicity vector `(m_1, .., m_g)` with `sum i m_i <= g`,
    /// filtered by the stratum constraints.
    fn brute_force(g: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        let mut m = vec![0usize; g + 1];
        loop {
            let total: usize = (1..=g).map(|i| i * m[i]).sum();
            let parts: usize = m.iter().sum();
            if total < g || (total == g && parts >= 2) {
                let mut v: Vec<usize> = (1..=g).rev().flat_map(|i| std::iter::repeat_n(i, m[i])).collect();
                v.sort_unstable_by(|a, b| b.cmp(a));
                out.insert(v);
            }
            // odometer with digit i running over 0..=g/i
            let mut i = 1;
            while i <= g {
                if m[i] < g / i {
                    m[i] += 1;
                    break;
                }
                m[i] = 0;
                i += 1;
            }
            if i > g {
                return out;
            }
        }
    }

    /// Partition numbers from Euler's pentagonal recurrence.
    fn partition_numbers(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for k in 1..=n {
            let mut j = 1i64;
            loop {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                let mut any = false;
                for q in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
                    if q as usize <= k {
                        p[k] += sign * p[k - q as usize];
                        any = true;
                    }
                }
                if !any {
                    break;
                }
                j += 1;
            }
        }
        p
    }

    #[test]
    fn strata_match_brute_force() {
        let p = partition_numbers(8);
        for g in 1..=8 {
            let strata = enumerate_boundary_strata(g, false).unwrap();
            let expected: i64 = p[..g].iter().sum::<i64>() + p[g] - 1;
            assert_eq!(strata.len() as i64, expected);
            let got: BTreeSet<Vec<usize>> = strata.iter().map(|s| s.genera.clone()).collect();
            assert_eq!(got.len(), strata.len());
            assert_eq!(got, brute_force(g));
        }
    }
}

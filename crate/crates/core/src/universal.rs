//! The direct limit `h_inf` of the stabilizing embeddings `h_g -> h_{g+1}`
//! (pad `X` with zeros and `Y` with the identity), canonical minimal-genus
//! representatives, and boundary strata of the completion.
//!
//! Index sets in this module are 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::siegel::{siegel_distance, SiegelPoint};

/// Trailing blocks within this distance of the padding pattern are stripped.
pub const PADDING_TOLERANCE: f64 = 1e-9;
/// A diagonal entry of `Y` this many times larger than the median of the
/// smaller ones marks a divergent direction.
pub const DIVERGENCE_RATIO: f64 = 1e8;
/// Slack on the reduced-coupling conditions checked by [`boundary_project`].
pub const STANDARD_POSITION_TOLERANCE: f64 = 1e-6;

/// Canonical representative of a point of `h_inf`: the minimal genus in
/// which it appears.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UniversalPointJson", into = "UniversalPointJson")]
pub struct UniversalPoint {
    point: SiegelPoint,
}

impl UniversalPoint {
    pub fn genus(&self) -> usize {
        self.point.genus()
    }

    pub fn point(&self) -> &SiegelPoint {
        &self.point
    }

    pub fn into_point(self) -> SiegelPoint {
        self.point
    }

    /// The representative in `h_target`.
    pub fn at_genus(&self, target: usize) -> Result<SiegelPoint> {
        embed_point(&self.point, target)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniversalPointJson {
    pub g: usize,
    pub point: SiegelPoint,
}

impl TryFrom<UniversalPointJson> for UniversalPoint {
    type Error = Error;

    fn try_from(j: UniversalPointJson) -> Result<Self> {
        if j.point.genus() != j.g {
            return Err(Error::GenusMismatch(j.g, j.point.genus()));
        }
        let u = stabilize(&j.point);
        if u.genus() != j.g {
            return Err(Error::InvalidConfig(format!(
                "universal point of declared genus {} is padded down to genus {}",
                j.g,
                u.genus()
            )));
        }
        Ok(u)
    }
}

impl From<UniversalPoint> for UniversalPointJson {
    fn from(u: UniversalPoint) -> Self {
        UniversalPointJson {
            g: u.genus(),
            point: u.point,
        }
    }
}

pub fn embed_point(z: &SiegelPoint, target_genus: usize) -> Result<SiegelPoint> {
    z.padded(target_genus)
}

fn trailing_block_is_padding(z: &SiegelPoint) -> bool {
    let g = z.genus();
    let last = g - 1;
    let (x, y) = (z.x().matrix(), z.y().matrix());
    (0..g).all(|j| x[(last, j)].abs() <= PADDING_TOLERANCE)
        && (0..last).all(|j| y[(last, j)].abs() <= PADDING_TOLERANCE)
        && (y[(last, last)] - 1.0).abs() <= PADDING_TOLERANCE
}

/// Strips trailing padding blocks. Genus never drops below 1.
pub fn stabilize(z: &SiegelPoint) -> UniversalPoint {
    let mut g = z.genus();
    let mut current = z.clone();
    while g > 1 && trailing_block_is_padding(&current) {
        g -= 1;
        let idx: Vec<usize> = (0..g).collect();
        current = current
            .sub_block(&idx)
            .expect("leading principal block of a positive form is positive");
    }
    UniversalPoint { point: current }
}

/// Distance in `h_inf`: both points are embedded in the larger genus.
pub fn universal_distance(u1: &UniversalPoint, u2: &UniversalPoint) -> Result<f64> {
    let g = u1.genus().max(u2.genus());
    siegel_distance(&u1.at_genus(g)?, &u2.at_genus(g)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumKind {
    Interior,
    Boundary,
}

/// A stratum of the completion: `Interior({g})`, or `Boundary({g_1, .., g_k})`
/// with `Boundary({})` the cusp `A_0`. Genera are stored in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumDescriptor {
    pub kind: StratumKind,
    pub genera: Vec<usize>,
}

impl StratumDescriptor {
    pub fn interior(g: usize) -> Self {
        Self {
            kind: StratumKind::Interior,
            genera: vec![g],
        }
    }

    pub fn boundary(mut genera: Vec<usize>) -> Self {
        genera.sort_unstable_by(|a, b| b.cmp(a));
        Self {
            kind: StratumKind::Boundary,
            genera,
        }
    }

    pub fn cusp() -> Self {
        Self::boundary(Vec::new())
    }

    pub fn is_cusp(&self) -> bool {
        self.kind == StratumKind::Boundary && self.genera.is_empty()
    }

    pub fn total_genus(&self) -> usize {
        self.genera.iter().sum()
    }

    /// Checks the descriptor invariants.
    pub fn is_valid(&self) -> bool {
        match self.kind {
            StratumKind::Interior => self.genera.len() == 1,
            StratumKind::Boundary => self.genera.iter().all(|&g| g >= 1),
        }
    }
}

impl fmt::Display for StratumDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            StratumKind::Interior => "Interior",
            StratumKind::Boundary => "Boundary",
        };
        let parts: Vec<String> = self.genera.iter().map(|g| g.to_string()).collect();
        write!(f, "{kind}({{{}}})", parts.join(","))
    }
}

/// A point of a stratum: the descriptor plus the retained block (`None` for
/// the cusp).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub descriptor: StratumDescriptor,
    pub point: Option<SiegelPoint>,
}

fn validate_indices(g: usize, idx: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return Err(Error::InvalidIndexSet(format!("repeated index in {idx:?}")));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= g) {
        return Err(Error::InvalidIndexSet(format!(
            "index {bad} out of range for genus {g}"
        )));
    }
    Ok(sorted)
}

/// Largest violation of the reduced-coupling conditions between retained
/// and divergent coordinates: `|x_rd| <= 1/2` and `2|y_rd| <= y_rr`.
fn coupling_excess(z: &SiegelPoint, retained: &[usize], divergent: &[usize]) -> f64 {
    let (x, y) = (z.x().matrix(), z.y().matrix());
    let mut worst = f64::NEG_INFINITY;
    for &r in retained {
        for &d in divergent {
            worst = worst.max(x[(r, d)].abs() - 0.5).max(2.0 * y[(r, d)].abs() - y[(r, r)]);
        }
    }
    worst
}

/// Limit of `Z` along the ray on which the imaginary parts of the
/// coordinates outside `retained` diverge: the standard boundary component
/// `h_{g'}` with `g' = |retained|`, reached as the retained block.
///
/// Retaining every index gives the interior point itself; retaining none
/// gives the cusp. The point must be in standard position relative to the
/// split (reduced couplings), otherwise the coordinate split is meaningless
/// and [`Error::NotStandardPosition`] is returned.
pub fn boundary_project(z: &SiegelPoint, retained: &[usize]) -> Result<BoundaryPoint> {
    let g = z.genus();
    let kept = validate_indices(g, retained)?;
    if kept.len() == g {
        return Ok(BoundaryPoint {
            descriptor: StratumDescriptor::interior(g),
            point: Some(z.clone()),
        });
    }
    if kept.is_empty() {
        return Ok(BoundaryPoint {
            descriptor: StratumDescriptor::cusp(),
            point: None,
        });
    }
    let divergent: Vec<usize> = (0..g).filter(|i| !kept.contains(i)).collect();
    let excess = coupling_excess(z, &kept, &divergent);
    if excess > STANDARD_POSITION_TOLERANCE {
        return Err(Error::NotStandardPosition(excess));
    }
    Ok(BoundaryPoint {
        descriptor: StratumDescriptor::boundary(vec![kept.len()]),
        point: Some(z.sub_block(&kept)?),
    })
}

/// Coordinates whose `y_dd` exceeds [`DIVERGENCE_RATIO`] times the median of
/// the smaller diagonal entries.
pub fn divergent_directions(z: &SiegelPoint) -> Vec<usize> {
    let y = z.y().matrix();
    let mut order: Vec<usize> = (0..z.genus()).collect();
    order.sort_by(|&a, &b| y[(a, a)].total_cmp(&y[(b, b)]));
    for split in 1..order.len() {
        let below: Vec<f64> = order[..split].iter().map(|&i| y[(i, i)]).collect();
        let median = if below.len() % 2 == 1 {
            below[below.len() / 2]
        } else {
            0.5 * (below[below.len() / 2 - 1] + below[below.len() / 2])
        };
        if y[(order[split], order[split])] > DIVERGENCE_RATIO * median {
            let mut out = order[split..].to_vec();
            out.sort_unstable();
            return out;
        }
    }
    Vec::new()
}

/// [`boundary_project`] along the numerically detected divergent directions.
pub fn boundary_limit(z: &SiegelPoint) -> Result<BoundaryPoint> {
    let divergent = divergent_directions(z);
    let retained: Vec<usize> = (0..z.genus()).filter(|i| !divergent.contains(i)).collect();
    boundary_project(z, &retained)
}

/// Input to [`classify_stratum`].
#[derive(Clone, Copy, Debug)]
pub enum Candidate<'a> {
    Universal(&'a UniversalPoint),
    Boundary(&'a BoundaryPoint),
}

pub fn classify_stratum(candidate: Candidate<'_>) -> StratumDescriptor {
    match candidate {
        Candidate::Universal(u) => StratumDescriptor::interior(u.genus()),
        Candidate::Boundary(b) => b.descriptor.clone(),
    }
}

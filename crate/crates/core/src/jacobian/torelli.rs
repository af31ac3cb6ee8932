use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::curve::HyperellipticCurve;
use super::periods::period_matrix;
use crate::error::{Error, Result};
use crate::reduction::siegel_reduce;
use crate::siegel::SiegelPoint;
use crate::universal::{stabilize, BoundaryPoint, StratumDescriptor, UniversalPoint};

/// How a disjoint union of curves is presented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnionRole {
    /// A point of the boundary stratum `Boundary({g_1, .., g_k})`.
    Boundary,
    /// A product point of the interior of `A_{g_1 + .. + g_k}`.
    Interior,
}

/// Reduced period point of one curve, as a canonical point of `h_inf`.
pub fn torelli_embed(curve: &HyperellipticCurve) -> Result<UniversalPoint> {
    Ok(stabilize(&reduced_period_point(curve)?))
}

pub fn reduced_period_point(curve: &HyperellipticCurve) -> Result<SiegelPoint> {
    Ok(siegel_reduce(&period_matrix(curve)?)?.reduced)
}

/// Block-diagonal assembly of the reduced period points of a disjoint union,
/// in the given order.
pub fn torelli_embed_union(curves: &[HyperellipticCurve], role: UnionRole) -> Result<BoundaryPoint> {
    if curves.is_empty() {
        return Err(Error::InvalidCurve("empty disjoint union".into()));
    }
    let blocks = curves.iter().map(reduced_period_point).collect::<Result<Vec<_>>>()?;
    let genera: Vec<usize> = blocks.iter().map(SiegelPoint::genus).collect();
    let total: usize = genera.iter().sum();
    let mut x = DMatrix::zeros(total, total);
    let mut y = DMatrix::zeros(total, total);
    let mut offset = 0;
    for b in &blocks {
        let g = b.genus();
        x.view_mut((offset, offset), (g, g)).copy_from(b.x().matrix());
        y.view_mut((offset, offset), (g, g)).copy_from(b.y().matrix());
        offset += g;
    }
    let descriptor = match role {
        UnionRole::Boundary => StratumDescriptor::boundary(genera),
        UnionRole::Interior => StratumDescriptor::interior(total),
    };
    Ok(BoundaryPoint {
        descriptor,
        point: Some(SiegelPoint::from_matrices(x, y)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn lemniscatic_curve_lands_on_i() {
        let u = torelli_embed(&HyperellipticCurve::new(vec![-1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(u.genus(), 1);
        assert!((u.point().entry(0, 0) - C64::new(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn disjoint_union_is_block_diagonal() {
        let c1 = HyperellipticCurve::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let c2 = HyperellipticCurve::new(vec![0.0, 1.0, 2.5, 4.0]).unwrap();
        let t1 = reduced_period_point(&c1).unwrap().entry(0, 0);
        let t2 = reduced_period_point(&c2).unwrap().entry(0, 0);
        let b = torelli_embed_union(&[c1.clone(), c2.clone()], UnionRole::Boundary).unwrap();
        assert_eq!(b.descriptor.to_string(), "Boundary({1,1})");
        let p = b.point.unwrap();
        assert_eq!(p.entry(0, 0), t1);
        assert_eq!(p.entry(1, 1), t2);
        assert_eq!(p.entry(0, 1), C64::new(0.0, 0.0));
        let i = torelli_embed_union(&[c1, c2], UnionRole::Interior).unwrap();
        assert_eq!(i.descriptor.to_string(), "Interior({2})");
    }

    #[test]
    fn distinct_curves_give_distinct_points() {
        let a = torelli_embed(&HyperellipticCurve::new(vec![-1.0, 0.0, 1.0]).unwrap()).unwrap();
        let b = torelli_embed(&HyperellipticCurve::new(vec![-1.0, 0.0, 3.0]).unwrap()).unwrap();
        assert!(crate::universal::universal_distance(&a, &b).unwrap() > 1e-3);
    }
}

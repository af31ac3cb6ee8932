use proptest::prelude::*;
use siegel_moduli::degeneration::{
    enumerate_boundary_strata, make_family, neck_limit_probe, Classification, DegenerationKind,
};
use siegel_moduli::jacobian::reduced_period_point;
use siegel_moduli::universal::{boundary_project, StratumDescriptor, StratumKind};
use siegel_moduli::SiegelPoint;

const EPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[test]
fn separating_limit_stays_interior() {
    let family = make_family(DegenerationKind::Separating, &[1, 1], &EPS).unwrap();
    let report = neck_limit_probe(&family).unwrap();
    assert_eq!(report.classification, Classification::Finite);
    let last = report.reduced_points.last().unwrap();
    // cut the residual coupling, then project with both coordinates kept
    let mut x = last.x().matrix().clone();
    let mut y = last.y().matrix().clone();
    for m in [&mut x, &mut y] {
        m[(0, 1)] = 0.0;
        m[(1, 0)] = 0.0;
    }
    let split = SiegelPoint::from_matrices(x, y).unwrap();
    let b = boundary_project(&split, &[0, 1]).unwrap();
    assert_eq!(b.descriptor, StratumDescriptor::interior(2));
    assert_eq!(family.limit_stratum().kind, StratumKind::Interior);
}

#[test]
fn nonseparating_limit_reaches_boundary_of_genus_one() {
    let family = make_family(DegenerationKind::NonSeparating, &[2], &EPS).unwrap();
    let report = neck_limit_probe(&family).unwrap();
    assert_eq!(report.classification, Classification::Divergent);
    let blocks: Vec<SiegelPoint> = report
        .reduced_points
        .iter()
        .map(|z| {
            let b = boundary_project(z, &[0]).unwrap();
            assert_eq!(b.descriptor, StratumDescriptor::boundary(vec![1]));
            b.point.unwrap()
        })
        .collect();
    let n = blocks.len();
    assert!(blocks[n - 1].max_abs_diff(&blocks[n - 2]) < 1e-3);
    let cluster = reduced_period_point(&family.limit_curves().unwrap()[0]).unwrap();
    assert!(
        blocks[n - 1].approx_eq(&cluster, 1e-3),
        "{:?} vs {cluster:?}",
        blocks[n - 1]
    );
}

/// Multisets of positive parts summing to at most `g` with every part
/// below `g`, plus the empty multiset, by recursion over the largest part.
fn partitions_below(total: usize, max_part: usize) -> usize {
    if total == 0 {
        return 1;
    }
    (1..=max_part.min(total)).map(|p| partitions_below(total - p, p)).sum()
}

proptest! {
    #[test]
    fn strata_count_matches_partitions(g in 1usize..=8) {
        let strata = enumerate_boundary_strata(g, false).unwrap();
        let expected: usize = (0..=g).map(|t| partitions_below(t, g - 1)).sum();
        prop_assert_eq!(strata.len(), expected);
        prop_assert!(strata.iter().all(|d| d.is_valid() && d.total_genus() <= g));
    }
}

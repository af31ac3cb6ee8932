#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use siegel_moduli::SiegelPoint;

/// `X` symmetric with entries in `[-1, 1]`, `Y = A A^T + c I` with
/// `c in [0.2, 1.5]`.
pub fn point(g: usize) -> impl Strategy<Value = SiegelPoint> {
    (
        prop::collection::vec(-1.0f64..1.0, g * g),
        prop::collection::vec(-1.0f64..1.0, g * g),
        0.2f64..1.5,
    )
        .prop_map(move |(xs, ys, c)| {
            let x = DMatrix::from_vec(g, g, xs);
            let a = DMatrix::from_vec(g, g, ys);
            let y = &a * a.transpose() + DMatrix::identity(g, g) * c;
            SiegelPoint::from_matrices((&x + x.transpose()) * 0.5, y).unwrap()
        })
}

pub fn genus_and_point(max_genus: usize) -> impl Strategy<Value = SiegelPoint> {
    (1..=max_genus).prop_flat_map(point)
}

pub fn genus_and_pair(max_genus: usize) -> impl Strategy<Value = (SiegelPoint, SiegelPoint)> {
    (1..=max_genus).prop_flat_map(|g| (point(g), point(g)))
}

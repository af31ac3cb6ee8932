//! Reduction to fundamental domains: Minkowski reduction of positive forms
//! under `GL(n, Z)` and Siegel reduction under `Sp(2g, Z)`.

pub mod minkowski;
pub mod siegel_domain;

pub use minkowski::{is_minkowski_reduced, minkowski_reduce, MinkowskiReduction};
pub use siegel_domain::{
    dilation_set, fundamental_domain_margin, in_fundamental_domain, siegel_reduce, SiegelReduction,
};

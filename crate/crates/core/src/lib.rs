//! Numerical computation on Siegel upper half spaces `h_g`, their direct
//! limit `h_inf` under the stabilizing embeddings, and the image of moduli of
//! Riemann surfaces under the period map.
//!
//! Module map:
//!
//! - [`siegel`]: points, symplectic elements, the action and the invariant distance
//! - [`reduction`]: Minkowski reduction of positive forms and Siegel reduction
//! - [`universal`]: stabilization, canonical representatives, boundary strata
//! - [`jacobian`]: hyperelliptic period matrices, Torelli embedding, Bergman metric
//! - [`degeneration`]: pinching families and the boundary stratification
//! - [`measure`]: stratified Monte Carlo volumes and the genus-weighted partition sum
//! - [`cli`]: the `siegel` command-line frontend

pub mod cli;
pub mod degeneration;
pub mod error;
pub mod jacobian;
pub mod linalg;
pub mod measure;
pub mod quadrature;
pub mod reduction;
pub mod siegel;
pub mod universal;

pub use error::{Error, Result};
pub use siegel::{
    cross_ratio_eigenvalues, siegel_distance, sp_action, sp_embed, RealSymMatrix, SiegelPoint, SymplecticElement,
};

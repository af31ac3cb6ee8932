//! Period matrices of hyperelliptic curves, the Torelli map into `h_inf`,
//! and Bergman-metric quantities on the curve.

mod bergman;
mod curve;
mod periods;
mod torelli;

pub use bergman::*;
pub use curve::*;
pub use periods::*;
pub use torelli::*;

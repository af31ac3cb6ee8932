use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::siegel::SiegelPoint;

/// Harmonic map of the flat torus `C / (Z + tau Z)` to `R^N` in the class
/// sending the lattice generators `1` and `tau` to the translations `p`
/// and `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusMapSpec {
    tau: SiegelPoint,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl TorusMapSpec {
    pub fn new(tau: SiegelPoint, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if tau.genus() != 1 {
            return Err(Error::GenusMismatch(1, tau.genus()));
        }
        if p.len() != q.len() || p.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "translation vectors have lengths {} and {}",
                p.len(),
                q.len()
            )));
        }
        Ok(Self { tau, p, q })
    }

    pub fn tau(&self) -> &SiegelPoint {
        &self.tau
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Target dimension `N`.
    pub fn dimension(&self) -> usize {
        self.p.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `int |dh|^2` of the affine (harmonic) representative:
/// `(|p|^2 |tau|^2 - 2 (p.q) Re tau + |q|^2) / Im tau`.
pub fn dirichlet_energy_torus(spec: &TorusMapSpec) -> f64 {
    let tau = spec.tau.entry(0, 0);
    let (pp, pq, qq) = (dot(&spec.p, &spec.p), dot(&spec.p, &spec.q), dot(&spec.q, &spec.q));
    (pp * tau.norm_sqr() - 2.0 * pq * tau.re + qq) / tau.im
}

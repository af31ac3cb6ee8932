use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sampling::{check_sampled_genus, integrate_genus, MCResult};
use crate::error::{Error, Result};
use crate::quadrature::{exp_sinh, tanh_sinh, QuadOptions};
use crate::siegel::SiegelPoint;

/// Default random seed of every stochastic computation.
pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Largest genus with a volume-bearing stratum.
pub const MAX_VOLUME_GENUS: usize = 2;

/// Genus weights `lambda_g` of the stratified measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Explicit positive weights; genera without a weight are left out.
    ExplicitWeights(BTreeMap<usize, f64>),
    /// `lambda_g = exp(-alpha (2g - 2))`.
    StringWeights { alpha: f64 },
}

impl WeightMode {
    pub fn weight(&self, g: usize) -> Option<f64> {
        match self {
            WeightMode::ExplicitWeights(m) => m.get(&g).copied(),
            WeightMode::StringWeights { alpha } => Some((-alpha * (2.0 * g as f64 - 2.0)).exp()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratifiedMeasureConfig {
    pub mode: WeightMode,
    /// Highest genus summed over.
    pub truncation_genus: usize,
    pub seed: u64,
    /// Monte Carlo proposals per genus.
    pub n_samples: usize,
    /// Adds the one-point stratum `M_0` as a unit atom.
    pub include_genus_zero: bool,
}

impl StratifiedMeasureConfig {
    pub fn string_weights(alpha: f64, truncation_genus: usize) -> Result<Self> {
        let c = Self {
            mode: WeightMode::StringWeights { alpha },
            truncation_genus,
            seed: DEFAULT_SEED,
            n_samples: DEFAULT_SAMPLES,
            include_genus_zero: false,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn explicit_weights(weights: BTreeMap<usize, f64>, truncation_genus: usize) -> Result<Self> {
        let c = Self {
            mode: WeightMode::ExplicitWeights(weights),
            truncation_genus,
            seed: DEFAULT_SEED,
            n_samples: DEFAULT_SAMPLES,
            include_genus_zero: false,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.mode {
            WeightMode::ExplicitWeights(m) => {
                if let Some((g, w)) = m.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
                    return Err(Error::InvalidConfig(format!(
                        "weight of genus {g} is {w}, not positive"
                    )));
                }
            }
            WeightMode::StringWeights { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::InvalidConfig(format!("alpha = {alpha} is not positive")));
                }
            }
        }
        if self.truncation_genus == 0 {
            return Err(Error::InvalidConfig("truncation genus must be at least 1".into()));
        }
        if self.truncation_genus > MAX_VOLUME_GENUS {
            return Err(Error::Unsupported(format!(
                "truncation genus {} > {MAX_VOLUME_GENUS}",
                self.truncation_genus
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidConfig("need at least two samples".into()));
        }
        Ok(())
    }
}

/// Per-stratum integrand. Values must not depend on evaluation order.
pub trait Integrand: Sync {
    fn value(&self, z: &SiegelPoint) -> f64;

    /// Value at the single point of `M_0`.
    fn genus_zero_value(&self) -> f64 {
        1.0
    }
}

impl<F: Fn(&SiegelPoint) -> f64 + Sync> Integrand for F {
    fn value(&self, z: &SiegelPoint) -> f64 {
        self(z)
    }
}

/// Built-in integrands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrandChoice {
    /// `f = 1`: weighted volumes.
    One,
    /// `f = tr(Y^-1)`.
    TraceInverseY,
}

impl Integrand for IntegrandChoice {
    fn value(&self, z: &SiegelPoint) -> f64 {
        match self {
            IntegrandChoice::One => 1.0,
            IntegrandChoice::TraceInverseY => z.y().matrix().clone().try_inverse().map_or(f64::NAN, |m| m.trace()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeMethod {
    MonteCarlo {
        n: usize,
        seed: u64,
        workers: usize,
    },
    /// Genus 1 only: nested quadrature over the explicit domain.
    Quadrature,
}

/// `int_{A_1} f dx dy / y^2` over `|x| <= 1/2`, `|z| >= 1`, by nested
/// double-exponential quadrature.
pub fn genus_one_quadrature<F: Fn(&SiegelPoint) -> f64>(f: F) -> Result<MCResult> {
    let opts = QuadOptions::with_rel_tol(1e-12);
    let mut inner_failure = None;
    let mut evaluations = 0usize;
    let outer = tanh_sinh(-0.5, 0.5, &opts, |x, _, _| {
        let floor = (1.0 - x * x).sqrt();
        let inner = exp_sinh(floor, &opts, |y, _| {
            f(&SiegelPoint::upper_half_plane(x, y).expect("y > 0")) / (y * y)
        });
        match inner {
            Ok(e) => {
                evaluations += e.evaluations;
                e.value
            }
            Err(e) => {
                inner_failure.get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = inner_failure {
        return Err(e);
    }
    Ok(MCResult {
        estimate: outer.value,
        stderr: outer.error_estimate(),
        n_samples: evaluations,
        seed: 0,
    })
}

/// `vol(A_g)` for the measure `det(Y)^-(g+1) dX dY` (`pi/3` and `pi^3/270`).
pub fn stratum_volume(g: usize, method: VolumeMethod) -> Result<MCResult> {
    check_sampled_genus(g)?;
    match method {
        VolumeMethod::Quadrature if g == 1 => genus_one_quadrature(|_| 1.0),
        VolumeMethod::Quadrature => Err(Error::Unsupported(
            "quadrature volume is implemented for genus 1".into(),
        )),
        VolumeMethod::MonteCarlo { n, seed, workers } => {
            Ok(integrate_genus(g, &[|_: &SiegelPoint| 1.0], n, seed, workers)?[0])
        }
    }
}

/// One term `lambda_g I_g` of a stratified sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumTerm {
    pub genus: usize,
    pub weight: f64,
    pub integral: MCResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratifiedResult {
    pub total: MCResult,
    pub terms: Vec<StratumTerm>,
}

fn stratified_terms(f: &dyn Integrand, config: &StratifiedMeasureConfig, workers: usize) -> Result<Vec<StratumTerm>> {
    config.validate()?;
    let mut terms = Vec::new();
    if config.include_genus_zero {
        if let Some(w) = config.mode.weight(0) {
            terms.push(StratumTerm {
                genus: 0,
                weight: w,
                integral: MCResult {
                    estimate: f.genus_zero_value(),
                    stderr: 0.0,
                    n_samples: 1,
                    seed: config.seed,
                },
            });
        }
    }
    for g in 1..=config.truncation_genus {
        let Some(w) = config.mode.weight(g) else { continue };
        let integral = integrate_genus(
            g,
            &[|z: &SiegelPoint| f.value(z)],
            config.n_samples,
            config.seed,
            workers,
        )?[0];
        terms.push(StratumTerm {
            genus: g,
            weight: w,
            integral,
        });
    }
    Ok(terms)
}

fn combine(terms: &[StratumTerm], config: &StratifiedMeasureConfig) -> MCResult {
    let mut estimate = 0.0;
    let mut var = 0.0;
    for t in terms {
        estimate += t.weight * t.integral.estimate;
        var += (t.weight * t.integral.stderr).powi(2);
    }
    MCResult {
        estimate,
        stderr: var.sqrt(),
        n_samples: config.n_samples,
        seed: config.seed,
    }
}

/// `sum_{g <= G} lambda_g int f dmu_g`, strata sampled independently and
/// standard errors combined in quadrature.
pub fn integrate_stratified(
    f: &dyn Integrand,
    config: &StratifiedMeasureConfig,
    workers: usize,
) -> Result<StratifiedResult> {
    let terms = stratified_terms(f, config, workers)?;
    Ok(StratifiedResult {
        total: combine(&terms, config),
        terms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub value: MCResult,
    /// `C e^(-2 alpha G) / (1 - e^(-2 alpha))` with `C = max I_g`: the
    /// omitted genera if their integrals stay below the largest observed
    /// one. Reported, not proved.
    pub tail_bound: f64,
    pub terms: Vec<StratumTerm>,
}

/// Truncated genus expansion `sum_{g <= G} e^(-alpha (2g-2)) I_g`.
pub fn partition_function(
    f: &dyn Integrand,
    config: &StratifiedMeasureConfig,
    workers: usize,
) -> Result<PartitionResult> {
    let alpha = match config.mode {
        WeightMode::StringWeights { alpha } => alpha,
        WeightMode::ExplicitWeights(_) => {
            return Err(Error::InvalidConfig(
                "the partition function uses string weights".into(),
            ))
        }
    };
    let terms = stratified_terms(f, config, workers)?;
    let c = terms.iter().fold(0.0f64, |m, t| m.max(t.integral.estimate.abs()));
    let q = (-2.0 * alpha).exp();
    let tail_bound = c * (-2.0 * alpha * config.truncation_genus as f64).exp() / (1.0 - q);
    Ok(PartitionResult {
        value: combine(&terms, config),
        tail_bound,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_volume_of_a1() {
        let v = stratum_volume(1, VolumeMethod::Quadrature).unwrap();
        assert!((v.estimate - PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn weights() {
        let s = WeightMode::StringWeights { alpha: 1.0 };
        assert_eq!(s.weight(1), Some(1.0));
        assert!((s.weight(2).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        assert!((s.weight(0).unwrap() - 2.0f64.exp()).abs() < 1e-14);
        let bad = StratifiedMeasureConfig::explicit_weights(BTreeMap::from([(1, 1.0), (2, 0.0)]), 2);
        assert_eq!(bad.unwrap_err().kind(), "InvalidConfig");
        assert_eq!(
            StratifiedMeasureConfig::string_weights(-1.0, 2).unwrap_err().kind(),
            "InvalidConfig"
        );
        assert_eq!(
            StratifiedMeasureConfig::string_weights(1.0, 3).unwrap_err().kind(),
            "Unsupported"
        );
    }

    #[test]
    fn single_stratum_reduction() {
        let cfg = StratifiedMeasureConfig::explicit_weights(BTreeMap::from([(1, 1.0)]), 2)
            .unwrap()
            .with_samples(20_000);
        let r = integrate_stratified(&IntegrandChoice::One, &cfg, 2).unwrap();
        let v1 = stratum_volume(
            1,
            VolumeMethod::MonteCarlo {
                n: 20_000,
                seed: DEFAULT_SEED,
                workers: 1,
            },
        )
        .unwrap();
        assert_eq!(r.total.estimate, v1.estimate);
        assert_eq!(r.terms.len(), 1);
    }

    #[test]
    fn genus_zero_atom() {
        let mut cfg = StratifiedMeasureConfig::string_weights(1.0, 1)
            .unwrap()
            .with_samples(1000);
        let without = integrate_stratified(&IntegrandChoice::One, &cfg, 1)
            .unwrap()
            .total
            .estimate;
        cfg.include_genus_zero = true;
        let with = integrate_stratified(&IntegrandChoice::One, &cfg, 1)
            .unwrap()
            .total
            .estimate;
        assert!((with - without - 2.0f64.exp()).abs() < 1e-12);
    }
}

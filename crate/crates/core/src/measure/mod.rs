//! Stratified measure `sum lambda_g mu_g`, stratum volumes, the Dirichlet
//! energy on flat tori and the truncated genus sum.
//!
//! `mu_g` is `det(Y)^-(g+1) dX dY` restricted to the fundamental domain,
//! with no genus-dependent constant: `vol(A_1) = pi/3`,
//! `vol(A_2) = pi^3/270`.

mod config;
mod sampling;
mod stratified;
mod torus;

pub use config::FileConfig;
pub use sampling::{check_sampled_genus, integrate_genus, sample_fundamental_domain, MCResult, SampleSet, STREAMS};
pub use stratified::{
    genus_one_quadrature, integrate_stratified, partition_function, stratum_volume, Integrand, IntegrandChoice,
    PartitionResult, StratifiedMeasureConfig, StratifiedResult, StratumTerm, VolumeMethod, WeightMode, DEFAULT_SAMPLES,
    DEFAULT_SEED, MAX_VOLUME_GENUS,
};
pub use torus::{dirichlet_energy_torus, TorusMapSpec};

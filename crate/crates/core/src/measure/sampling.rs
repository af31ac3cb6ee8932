//! Weighted sampling of the fundamental domains of `A_1` and `A_2` for the
//! measure `det(Y)^-(g+1) dX dY`.
//!
//! Proposals are drawn in fixed streams: stream `s` of genus `g` is a
//! ChaCha generator keyed by `(seed, g)` on stream number `s`, and owns a
//! fixed share of the proposals. Partial sums are combined in stream order,
//! so results do not depend on how streams are spread over threads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::in_fundamental_domain;
use crate::siegel::SiegelPoint;

/// Number of independent random streams per genus.
pub const STREAMS: usize = 64;

/// `sqrt(3) / 2`, the lower bound of `y_11` on the fundamental domain.
const C: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub estimate: f64,
    pub stderr: f64,
    #[serde(rename = "n")]
    pub n_samples: usize,
    pub seed: u64,
}

/// Accepted proposals with their importance weights. Estimates of
/// `int f dmu_g` are `sum w_i f(z_i) / proposals`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub genus: usize,
    pub proposals: usize,
    pub points: Vec<SiegelPoint>,
    pub weights: Vec<f64>,
}

pub fn check_sampled_genus(g: usize) -> Result<()> {
    if g == 0 || g > 2 {
        return Err(Error::Unsupported(format!(
            "fundamental-domain sampling is implemented for genus 1 and 2, got {g}"
        )));
    }
    Ok(())
}

fn stream_rng(seed: u64, genus: usize, stream: usize) -> ChaCha8Rng {
    let key = seed ^ (genus as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(stream as u64);
    rng
}

fn stream_share(n: usize, stream: usize) -> usize {
    n / STREAMS + usize::from(stream < n % STREAMS)
}

/// Uniform on `(0, 1]`.
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// One proposal and its weight `target / proposal` (before the domain
/// indicator).
fn propose<R: Rng>(g: usize, rng: &mut R) -> (SiegelPoint, f64) {
    match g {
        1 => {
            // density 1/y^2 on [-1/2, 1/2] x [c, inf), total mass 1/c
            let x = rng.random::<f64>() - 0.5;
            let y = C / open_unit(rng);
            (SiegelPoint::upper_half_plane(x, y).expect("y > 0"), 1.0 / C)
        }
        _ => {
            // y11 ~ 3 c^3 y11^-4 on [c, inf), y22 ~ 2 y11^2 y22^-3 on [y11, inf),
            // y12 uniform on [0, y11/2], X uniform on the unit box:
            // proposal density 12 c^3 / (y11 y22)^3
            let y11 = C * open_unit(rng).powf(-1.0 / 3.0);
            let y22 = y11 / open_unit(rng).sqrt();
            let y12 = 0.5 * y11 * rng.random::<f64>();
            let x11 = rng.random::<f64>() - 0.5;
            let x12 = rng.random::<f64>() - 0.5;
            let x22 = rng.random::<f64>() - 0.5;
            let det = y11 * y22 - y12 * y12;
            let w = (y11 * y22 / det).powi(3) / (12.0 * C * C * C);
            let x = DMatrix::from_row_slice(2, 2, &[x11, x12, x12, x22]);
            let y = DMatrix::from_row_slice(2, 2, &[y11, y12, y12, y22]);
            (SiegelPoint::from_matrices(x, y).expect("reduced form is positive"), w)
        }
    }
}

/// `n` proposals for genus `g`; the accepted ones all lie in the
/// fundamental domain.
pub fn sample_fundamental_domain(g: usize, n: usize, seed: u64) -> Result<SampleSet> {
    check_sampled_genus(g)?;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for s in 0..STREAMS {
        let mut rng = stream_rng(seed, g, s);
        for _ in 0..stream_share(n, s) {
            let (z, w) = propose(g, &mut rng);
            if in_fundamental_domain(&z)? {
                points.push(z);
                weights.push(w);
            }
        }
    }
    Ok(SampleSet {
        genus: g,
        proposals: n,
        points,
        weights,
    })
}

#[derive(Clone, Copy, Debug, Default)]
struct Partial {
    sum: f64,
    sum_sq: f64,
}

fn run_stream<F>(g: usize, seed: u64, stream: usize, n: usize, integrands: &[F]) -> Result<Vec<Partial>>
where
    F: Fn(&SiegelPoint) -> f64,
{
    let mut rng = stream_rng(seed, g, stream);
    let mut acc = vec![Partial::default(); integrands.len()];
    for _ in 0..stream_share(n, stream) {
        let (z, w) = propose(g, &mut rng);
        if in_fundamental_domain(&z)? {
            for (a, f) in acc.iter_mut().zip(integrands) {
                let v = w * f(&z);
                a.sum += v;
                a.sum_sq += v * v;
            }
        }
    }
    Ok(acc)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

/// Monte Carlo estimates of `int f dmu_g` for several integrands over one
/// shared sample, on `workers` threads. Bit-identical for any worker count.
pub fn integrate_genus<F>(g: usize, integrands: &[F], n: usize, seed: u64, workers: usize) -> Result<Vec<MCResult>>
where
    F: Fn(&SiegelPoint) -> f64 + Sync,
{
    check_sampled_genus(g)?;
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two samples".into()));
    }
    let partials = pool(workers)?.install(|| {
        (0..STREAMS)
            .into_par_iter()
            .map(|s| run_stream(g, seed, s, n, integrands))
            .collect::<Result<Vec<_>>>()
    })?;
    let nf = n as f64;
    Ok((0..integrands.len())
        .map(|k| {
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for p in &partials {
                sum += p[k].sum;
                sum_sq += p[k].sum_sq;
            }
            let mean = sum / nf;
            let var = ((sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
            MCResult {
                estimate: mean,
                stderr: (var / nf).sqrt(),
                n_samples: n,
                seed,
            }
        })
        .collect())
}

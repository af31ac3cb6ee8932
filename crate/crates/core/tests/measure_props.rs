use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use siegel_moduli::measure::{
    genus_one_quadrature, integrate_genus, integrate_stratified, partition_function, sample_fundamental_domain,
    stratum_volume, IntegrandChoice, StratifiedMeasureConfig, VolumeMethod,
};
use siegel_moduli::reduction::in_fundamental_domain;
use siegel_moduli::SiegelPoint;

fn inv_y(z: &SiegelPoint) -> f64 {
    1.0 / z.y().get(0, 0)
}

#[test]
fn inverse_height_matches_closed_form() {
    // int_{-1/2}^{1/2} int_{sqrt(1-x^2)}^inf y^-3 dy dx = ln(3) / 2
    let exact = 3f64.ln() / 2.0;
    let q = genus_one_quadrature(inv_y).unwrap();
    assert!((q.estimate - exact).abs() < 1e-10);
    let mc = integrate_genus(1, &[inv_y], 200_000, 5, 4).unwrap()[0];
    assert!((mc.estimate - exact).abs() < 3.0 * mc.stderr, "{mc:?} vs {exact}");
}

#[test]
fn stderr_scales_like_inverse_root_n() {
    for seed in 0..10 {
        let small = stratum_volume(
            1,
            VolumeMethod::MonteCarlo {
                n: 4_000,
                seed,
                workers: 2,
            },
        )
        .unwrap();
        let large = stratum_volume(
            1,
            VolumeMethod::MonteCarlo {
                n: 16_000,
                seed,
                workers: 2,
            },
        )
        .unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((2.0 / 1.5..=2.0 * 1.5).contains(&ratio), "seed {seed}: ratio {ratio}");
    }
}

#[test]
fn string_weights_compose_the_volumes() {
    let n = 200_000;
    let cfg = StratifiedMeasureConfig::string_weights(1.0, 2)
        .unwrap()
        .with_samples(n)
        .with_seed(42);
    let r = integrate_stratified(&IntegrandChoice::One, &cfg, 4).unwrap();
    let expected = PI / 3.0 + (-2.0f64).exp() * PI.powi(3) / 270.0;
    assert!(
        (r.total.estimate - expected).abs() < 3.0 * r.total.stderr,
        "{:?} vs {expected}",
        r.total
    );
    let p = partition_function(&IntegrandChoice::One, &cfg, 4).unwrap();
    assert_eq!(p.value, r.total);
}

#[test]
fn partition_grows_with_truncation() {
    let one = StratifiedMeasureConfig::string_weights(0.7, 1)
        .unwrap()
        .with_samples(20_000);
    let two = StratifiedMeasureConfig::string_weights(0.7, 2)
        .unwrap()
        .with_samples(20_000);
    let a = partition_function(&IntegrandChoice::One, &one, 2).unwrap();
    let b = partition_function(&IntegrandChoice::One, &two, 2).unwrap();
    assert!(b.value.estimate >= a.value.estimate);
}

#[test]
fn large_alpha_is_dominated_by_genus_one() {
    // the genus-2 term of a G = 2 sum is part of the tail a G = 1 sum reports
    for alpha in [2.0, 4.0, 8.0] {
        let g1 = StratifiedMeasureConfig::string_weights(alpha, 1)
            .unwrap()
            .with_samples(20_000);
        let g2 = StratifiedMeasureConfig::string_weights(alpha, 2)
            .unwrap()
            .with_samples(20_000);
        let short = partition_function(&IntegrandChoice::One, &g1, 2).unwrap();
        let long = partition_function(&IntegrandChoice::One, &g2, 2).unwrap();
        let excess = long.value.estimate - short.value.estimate;
        assert!(
            excess >= 0.0 && excess <= short.tail_bound,
            "alpha {alpha}: {excess} vs {}",
            short.tail_bound
        );
        assert!(excess / long.value.estimate < 0.02);
    }
}

#[test]
fn additivity_over_a_shared_sample() {
    let f1 = |z: &SiegelPoint| z.y().get(0, 0).recip();
    let f2 = |z: &SiegelPoint| z.x().get(0, 0).powi(2);
    let both = |z: &SiegelPoint| f1(z) + f2(z);
    let fs: [&(dyn Fn(&SiegelPoint) -> f64 + Sync); 3] = [&f1, &f2, &both];
    let r = integrate_genus(2, &fs, 20_000, 9, 3).unwrap();
    let sum = r[0].estimate + r[1].estimate;
    assert!((r[2].estimate - sum).abs() <= 1e-13 * sum.abs());
}

#[test]
fn nonpositive_explicit_weights_are_rejected() {
    for w in [0.0, -1.0, f64::NAN] {
        let e = StratifiedMeasureConfig::explicit_weights(BTreeMap::from([(1, 1.0), (2, w)]), 2).unwrap_err();
        assert_eq!(e.kind(), "InvalidConfig");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn results_do_not_depend_on_workers(g in 1usize..=2, seed in any::<u64>(), n in 100usize..3000, w in 2usize..9) {
        let m = |workers| stratum_volume(g, VolumeMethod::MonteCarlo { n, seed, workers }).unwrap();
        let (a, b) = (m(1), m(w));
        prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn samples_lie_in_the_domain(g in 1usize..=2, seed in any::<u64>()) {
        let s = sample_fundamental_domain(g, 400, seed).unwrap();
        for z in &s.points {
            prop_assert!(in_fundamental_domain(z).unwrap());
        }
    }
}

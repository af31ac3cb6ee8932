mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siegel_moduli::siegel::{poincare_distance, random_integral_word};
use siegel_moduli::{cross_ratio_eigenvalues, siegel_distance, sp_action, SiegelPoint};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_composes(z in common::genus_and_point(3), seed in any::<u64>()) {
        let g = z.genus();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m1 = random_integral_word(g, 3, &mut rng);
        let m2 = random_integral_word(g, 3, &mut rng);
        let lhs = sp_action(&m1.compose(&m2).unwrap(), &z).unwrap();
        let rhs = sp_action(&m1, &sp_action(&m2, &z).unwrap()).unwrap();
        let scale = lhs.x().matrix().amax().max(lhs.y().matrix().amax()).max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * scale);
    }

    #[test]
    fn distance_is_invariant((a, b) in common::genus_and_pair(3), seed in any::<u64>(), len in 1usize..=8) {
        let g = a.genus();
        let m = random_integral_word(g, len, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = siegel_distance(&a, &b).unwrap();
        let dm = siegel_distance(&sp_action(&m, &a).unwrap(), &sp_action(&m, &b).unwrap()).unwrap();
        prop_assert!((d - dm).abs() <= 1e-8 * d.max(1.0), "{d} vs {dm}");
    }

    #[test]
    fn genus_one_is_hyperbolic(x1 in -3.0f64..3.0, y1 in 0.05f64..5.0, x2 in -3.0f64..3.0, y2 in 0.05f64..5.0) {
        let a = SiegelPoint::upper_half_plane(x1, y1).unwrap();
        let b = SiegelPoint::upper_half_plane(x2, y2).unwrap();
        let d = siegel_distance(&a, &b).unwrap();
        let h = poincare_distance(a.entry(0, 0), b.entry(0, 0));
        prop_assert!((d - h).abs() <= 1e-10 * h.max(1.0));
    }

    #[test]
    fn cross_ratio_eigenvalues_in_unit_interval((a, b) in common::genus_and_pair(3)) {
        for r in cross_ratio_eigenvalues(&a, &b).unwrap() {
            prop_assert!((0.0..1.0).contains(&r));
        }
    }
}

mod common;

use common::tau;
use hsuq::credible::interval_batch;
use hsuq::kernels::{self, SCORE_UPPER_BOUND};
use hsuq::tau::{mmle, simple_estimator};
use hsuq::CoordinatePosterior;
use proptest::prelude::*;

fn log_tau() -> impl Strategy<Value = f64> {
    (-9.0f64..0.0).prop_map(f64::exp)
}

fn obs() -> impl Strategy<Value = f64> {
    prop_oneof![-5.0f64..5.0, -40.0f64..40.0, -1e4f64..1e4]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn score_is_bounded(y in obs(), t in log_tau()) {
        // The supremum 1 is approached as |y| grows; allow round-off above it.
        let m = kernels::score_m(y, tau(t)).unwrap();
        prop_assert!((-1.0..=SCORE_UPPER_BOUND + 1e-12).contains(&m), "{}", m);
    }

    #[test]
    fn mean_is_odd_and_shrinks(y in obs(), t in log_tau()) {
        let m = kernels::posterior_mean(y, tau(t)).unwrap();
        prop_assert_eq!(kernels::posterior_mean(-y, tau(t)).unwrap(), -m);
        prop_assert!(m.abs() <= y.abs());
        prop_assert!(m * y >= 0.0);
    }

    #[test]
    fn variance_in_range(y in obs(), t in log_tau()) {
        let k = kernels::Kernels::new(y, tau(t)).unwrap();
        let v = k.posterior_variance();
        prop_assert!(v > 0.0 && v <= 1.0 + y * y / 4.0, "{}", v);
        prop_assert!(k.posterior_fourth_central() >= v * v * (1.0 - 1e-9));
    }

    #[test]
    fn cdf_is_monotone(y in -10.0f64..10.0, t in log_tau(), a in -12.0f64..12.0, d in 1e-3f64..5.0) {
        let p = CoordinatePosterior::new(y, tau(t)).unwrap();
        let (fa, fb) = (p.cdf(a).unwrap(), p.cdf(a + d).unwrap());
        prop_assert!((0.0..=1.0).contains(&fa) && fa <= fb + 1e-12, "{} {}", fa, fb);
    }

    #[test]
    fn log_lik_is_permutation_invariant(ys in prop::collection::vec(obs(), 2..40), t in log_tau(), seed in any::<u64>()) {
        let mut shuffled = ys.clone();
        let k = shuffled.len();
        shuffled.rotate_left((seed % k as u64) as usize);
        shuffled.swap(0, k - 1);
        prop_assert_eq!(
            kernels::log_marginal_lik(&ys, tau(t)).unwrap(),
            kernels::log_marginal_lik(&shuffled, tau(t)).unwrap()
        );
    }

    #[test]
    fn intervals_nest(y in -8.0f64..8.0, t in log_tau(), a1 in 0.01f64..0.5, a2 in 0.01f64..0.5) {
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        let wide = &interval_batch(&[y], tau(t), lo, 1.0).unwrap()[0];
        let narrow = &interval_batch(&[y], tau(t), hi, 1.0).unwrap()[0];
        prop_assert!(wide.lower() <= narrow.lower() + 1e-12 && wide.upper() >= narrow.upper() - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimators_stay_in_range(ys in prop::collection::vec(obs(), 2..120)) {
        let n = ys.len() as f64;
        for t in [mmle(&ys).unwrap().tau(), simple_estimator(&ys, 2.0, 1.0).unwrap().tau()] {
            prop_assert!(t >= 1.0 / n && t <= 1.0, "{}", t);
        }
    }
}

// Oracle constants are kept as printed by the derivation script.
#![allow(clippy::excessive_precision)]

mod common;

use common::{mean_se, simpson, tau};
use hsuq::numeric::special::norm_quantile;
use hsuq::{rng, CoordinatePosterior};

// tools/derive_oracles.py
const CDF_Y3_T01_AT15: f64 = 0.65023981158689397087;
const Q975_Y4_T005: f64 = 5.417551087693028203;

fn post(y: f64, t: f64) -> CoordinatePosterior {
    CoordinatePosterior::new(y, tau(t)).unwrap()
}

/// One point on each side of `zeta_tau` and one near it, for a few scales.
fn regimes() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for &t in &[1e-3, 0.05, 0.5] {
        let z = tau(t).zeta().max(1.0);
        v.extend([(0.1 * z, t), (z, t), (3.0 * z, t), (-z, t)]);
    }
    v
}

#[test]
fn cdf_symmetric_case() {
    assert!((post(0.0, 0.1).cdf(0.0).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn cdf_reference_value() {
    let p = post(3.0, 0.1);
    let f = p.cdf(1.5).unwrap();
    assert!((f - CDF_Y3_T01_AT15).abs() < 1e-9, "{f}");
}

#[test]
fn cdf_matches_empirical_draws() {
    let p = post(3.0, 0.1);
    let n = 10_000_000;
    let mut r = rng::stream(71, 0);
    let below = (0..n).filter(|_| p.rand_draw(&mut r) <= 1.5).count() as f64 / n as f64;
    let f = CDF_Y3_T01_AT15;
    assert!((below - f).abs() <= 4.0 * (f * (1.0 - f) / n as f64).sqrt(), "{below} vs {f}");
}

#[test]
fn quantile_values() {
    assert_eq!(post(0.0, 0.2).quantile(0.5).unwrap(), 0.0);
    let q = post(4.0, 0.05).quantile(0.975).unwrap();
    assert!((q - Q975_Y4_T005).abs() < 1e-7, "{q}");
}

#[test]
fn quantile_cdf_roundtrip_across_regimes() {
    for (y, t) in regimes() {
        let p = post(y, t);
        for &q in &[0.025, 0.5, 0.975] {
            let x = p.quantile(q).unwrap();
            assert!((p.cdf(x).unwrap() - q).abs() < 1e-8, "y={y} tau={t} q={q}");
        }
    }
}

#[test]
fn draws_match_quantiles_across_regimes() {
    let n = 200_000;
    for (k, (y, t)) in regimes().into_iter().enumerate() {
        let p = post(y, t);
        let mut r = rng::stream(5, k as u64);
        for &q in &[0.1, 0.5, 0.9] {
            let x = p.quantile(q).unwrap();
            let mut r2 = r.clone();
            let frac = (0..n).filter(|_| p.rand_draw(&mut r2) <= x).count() as f64 / n as f64;
            assert!((frac - q).abs() <= 4.0 * (q * (1.0 - q) / n as f64).sqrt(), "y={y} tau={t} q={q}: {frac}");
        }
        let _ = p.rand_draw(&mut r);
    }
}

#[test]
fn cdf_mean_equals_posterior_mean() {
    // E theta = int_0^inf (1 - F) - int_-inf^0 F.
    for &(y, t) in &[(1.0, 0.1), (3.0, 0.05), (-2.0, 0.3)] {
        let p = post(y, t);
        let upper = |s: f64| 1.0 - p.cdf(s).unwrap();
        let lower = |s: f64| p.cdf(s).unwrap();
        let hi = y.abs() + 12.0;
        let mut pos = 0.0;
        let mut neg = 0.0;
        let cuts = [0.0, 1e-6, 1e-3, 0.1, 1.0, 3.0, hi];
        for w in cuts.windows(2) {
            pos += simpson(&upper, w[0], w[1], 1e-10);
            neg += simpson(&lower, -w[1], -w[0], 1e-10);
        }
        let m = pos - neg;
        assert!((m - p.mean()).abs() < 1e-6, "y={y} tau={t}: {m} vs {}", p.mean());
    }
}

#[test]
fn draws_are_seed_determined() {
    let p = post(2.0, 0.1);
    let take = |seed| {
        let mut r = rng::stream(seed, 3);
        (0..20).map(|_| p.rand_draw(&mut r)).collect::<Vec<_>>()
    };
    assert_eq!(take(9), take(9));
    assert_ne!(take(9), take(10));
}

#[test]
fn null_draws_are_symmetric() {
    let p = post(0.0, 0.1);
    let mut r = rng::stream(13, 0);
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n).map(|_| p.rand_draw(&mut r)).collect();
    let sd = p.variance().sqrt();
    let skew: Vec<f64> = xs.iter().map(|x| (x / sd).powi(3)).collect();
    let (m, se) = mean_se(&skew);
    assert!(m.abs() <= 4.0 * se, "{m} +- {se}");
}

#[test]
fn draw_variance_matches_kernels() {
    let p = post(2.0, 0.1);
    let mut r = rng::stream(17, 0);
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n).map(|_| p.rand_draw(&mut r)).collect();
    let sq: Vec<f64> = xs.iter().map(|x| (x - p.mean()).powi(2)).collect();
    let (v, se) = mean_se(&sq);
    assert!((v - p.variance()).abs() <= 4.0 * se, "{v} vs {}", p.variance());
}

#[test]
fn fourth_moment_matches_draws() {
    let p = post(1.0, 0.01);
    let c4 = p.kernels().posterior_fourth_central();
    let mut r = rng::stream(19, 0);
    let n = 10_000_000;
    let q: Vec<f64> = (0..n).map(|_| (p.rand_draw(&mut r) - p.mean()).powi(4)).collect();
    let (m, se) = mean_se(&q);
    assert!((m - c4).abs() <= 4.0 * se, "{m} vs {c4}");
}

#[test]
fn symmetric_radius() {
    let p = post(0.0, 0.1);
    for &a in &[0.01, 0.05, 0.2] {
        let r = p.interval_radius(a).unwrap();
        let mass = p.cdf(r).unwrap() - p.cdf(-r).unwrap();
        assert!((mass - (1.0 - a)).abs() < 1e-8);
    }
}

#[test]
fn radius_monotone_in_alpha() {
    let p = post(1.2, 0.05);
    let rs: Vec<f64> = [0.01, 0.05, 0.1, 0.3].iter().map(|&a| p.interval_radius(a).unwrap()).collect();
    assert!(rs.windows(2).all(|w| w[0] > w[1]), "{rs:?}");
}

#[test]
fn null_radius_lower_bound() {
    let t = 1e-4;
    let r = post(0.0, t).interval_radius(0.05).unwrap();
    assert!(r >= 0.9 * norm_quantile(0.95) * t / 2.0, "{r}");
}

#[test]
fn interval_mass_identity() {
    for (y, t) in regimes() {
        let p = post(y, t);
        let iv = p.marginal_interval(0.05, 1.0).unwrap();
        let mass = p.cdf(iv.upper()).unwrap() - p.cdf(iv.lower()).unwrap();
        assert!((mass - 0.95).abs() < 1e-8, "y={y} tau={t}: {mass}");
    }
}

#[test]
fn interval_blowup_scaling() {
    let iv = post(0.0, 0.2).marginal_interval(0.05, 1.0).unwrap();
    assert_eq!(iv.center, 0.0);
    assert_eq!(iv.lower(), -iv.upper());
    let p = post(2.3, 0.2);
    let a = p.marginal_interval(0.1, 1.0).unwrap();
    let b = p.marginal_interval(0.1, 2.0).unwrap();
    assert_eq!(b.half_width, 2.0 * a.half_width);
    assert_eq!(a.center, b.center);
}

#[test]
fn radius_when_interval_end_crosses_zero() {
    // The 95% interval ends just below zero, where the posterior density has
    // its log singularity; the mass is steep there but continuous.
    let p = post(3.5799671212546134, 0.15414764380934864);
    let r = p.interval_radius(0.05).unwrap();
    assert!(r > p.mean() && r < p.mean() + 0.1, "{r}");
    assert!((p.mass_around(p.mean(), r).unwrap() - 0.95).abs() < 1e-8);
    for &q in &[0.0, 0.001, 0.01] {
        let cdf0 = p.cdf(0.0).unwrap();
        let x = p.quantile(cdf0 + q).unwrap();
        assert!((p.cdf(x).unwrap() - cdf0 - q).abs() < 1e-8, "q={q}");
    }
}

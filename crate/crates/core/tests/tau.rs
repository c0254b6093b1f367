mod common;

use common::tau;
use hsuq::credible::{excessive_bias_diagnostic, BiasConstants};
use hsuq::experiments::{generate, ScenarioConfig, SignalSpec};
use hsuq::kernels;
use hsuq::rng;
use hsuq::scale::tau_rate;
use hsuq::tau::{mmle, score_sum, simple_estimator};
use rand::Rng;
use rand_distr::StandardNormal;

const SEED: u64 = 2017;

fn sparse_sample(n: usize, p: usize, a: f64, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, 0);
    (0..n)
        .map(|i| {
            let z: f64 = r.sample(StandardNormal);
            z + if i < p { a } else { 0.0 }
        })
        .collect()
}

#[test]
fn zeros_sit_at_left_endpoint() {
    let est = mmle(&[0.0; 100]).unwrap();
    assert_eq!(est.tau(), 1.0 / 100.0);
    let d = est.diagnostics.unwrap();
    assert!(d.score.iter().all(|&s| s < 0.0));
    assert!(d.sign_changes.is_empty());
}

#[test]
fn figure_one_scenario() {
    let mut cfg = ScenarioConfig::new("fig1", 200, 10, SignalSpec::Groups(vec![(5, 7.0), (5, 1.5)]));
    cfg.seed = SEED;
    let sc = generate(&cfg, 0).unwrap();
    let t = mmle(&sc.y).unwrap().tau();
    assert!((0.03..=0.3).contains(&t), "{t}");
}

#[test]
fn matches_exhaustive_grid() {
    let n = 400;
    let ys = sparse_sample(n, 12, 4.0, SEED);
    let lo = 1.0 / n as f64;
    let m = 10_000;
    let grid: Vec<f64> = (0..m).map(|j| (lo.ln() * (1.0 - j as f64 / (m - 1) as f64)).exp()).collect();
    let (jbest, best) = grid
        .iter()
        .map(|&t| kernels::log_marginal_lik(&ys, tau(t)).unwrap())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    let est = mmle(&ys).unwrap();
    let t = est.tau();
    let (a, b) = (grid[jbest.saturating_sub(1)], grid[(jbest + 1).min(m - 1)]);
    assert!(t >= a && t <= b, "{t} not within one spacing of {}", grid[jbest]);
    let at = kernels::log_marginal_lik(&ys, tau(t)).unwrap();
    assert!(at >= best - 1e-9, "{at} < {best}");
}

#[test]
fn simple_estimator_examples() {
    let mut ys = vec![0.0; 400];
    ys[..5].fill(50.0);
    assert_eq!(simple_estimator(&ys, 2.0, 1.0).unwrap().tau(), 5.0 / 800.0);
    assert_eq!(simple_estimator(&[0.0; 400], 2.0, 1.0).unwrap().tau(), 1.0 / 400.0);
    assert_eq!(simple_estimator(&[1e6; 400], 2.0, 1.0).unwrap().tau(), 0.5);
    assert!(simple_estimator(&ys, 0.5, 1.0).is_err());
    assert!(simple_estimator(&[1.0], 2.0, 1.0).is_err());
}

#[test]
fn score_sum_for_zeros_is_negative() {
    for &t in &[1e-4, 0.01, 0.3, 1.0] {
        assert!(score_sum(&[0.0; 20], tau(t)).unwrap() < 0.0);
    }
}

#[test]
fn score_sum_is_likelihood_derivative() {
    let ys = sparse_sample(300, 15, 3.5, 7);
    let t = 0.1;
    let h = 1e-5;
    let fd = (kernels::log_marginal_lik(&ys, tau(t + h)).unwrap() - kernels::log_marginal_lik(&ys, tau(t - h)).unwrap())
        / (2.0 * h);
    let s = score_sum(&ys, tau(t)).unwrap();
    assert!((fd - s).abs() <= 1e-4 * s.abs(), "{fd} vs {s}");
}

#[test]
fn score_sum_doubles_on_concatenation() {
    let ys = sparse_sample(100, 5, 4.0, 3);
    let twice: Vec<f64> = ys.iter().chain(&ys).copied().collect();
    let (a, b) = (score_sum(&ys, tau(0.05)).unwrap(), score_sum(&twice, tau(0.05)).unwrap());
    assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs(), "{b} vs {a}");
}

fn condition_runs() -> Vec<(f64, Vec<f64>)> {
    let n = 400;
    let a = 5.0 * (2.0 * (n as f64).ln()).sqrt();
    let mut cfg = ScenarioConfig::new("cond", n, 20, SignalSpec::FixedValue(a));
    cfg.seed = SEED;
    (0..50)
        .map(|rep| {
            let sc = generate(&cfg, rep).unwrap();
            (mmle(&sc.y).unwrap().tau(), sc.theta0)
        })
        .collect()
}

#[test]
fn mmle_is_not_much_larger_than_rate() {
    let runs = condition_runs();
    let rate = tau_rate(400, 20);
    assert!(runs.iter().all(|(t, _)| *t >= 1.0 / 400.0));
    let ok = runs.iter().filter(|(t, _)| *t <= 5.0 * rate).count();
    assert!(ok as f64 >= 0.95 * runs.len() as f64, "{ok}/50");
}

#[test]
fn mmle_tracks_effective_sparsity() {
    let runs = condition_runs();
    let ok = runs
        .iter()
        .filter(|(t, theta0)| {
            let rep = excessive_bias_diagnostic(theta0, &BiasConstants::default()).unwrap();
            let r = tau_rate(400, rep.p_tilde.max(1));
            *t >= r / 10.0 && *t <= 10.0 * r
        })
        .count();
    assert!(ok as f64 >= 0.9 * runs.len() as f64, "{ok}/50");
}

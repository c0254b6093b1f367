mod common;

use common::{simpson, tau};
use hsuq::credible::{interval_batch, CredibleInterval};
use hsuq::experiments::{generate, ScenarioConfig, SignalLaw, SignalSpec};
use hsuq::selection::{discovery_report, select_by_interval, select_by_threshold, shrinkage_weights, SelectionMethod};
use hsuq::tau::mmle;
use hsuq::RegionLabel;

const SEED: u64 = 2017;

/// `I_{1/2} / I_{-1/2}` by direct quadrature in `u = sqrt(z)`.
fn kappa_oracle(y: f64, t: f64) -> f64 {
    let t2 = t * t;
    let base = |u: f64, k: i32| {
        let z = u * u;
        2.0 * u.powi(k) / (t2 + (1.0 - t2) * z) * (0.5 * y * y * (z - 1.0)).exp()
    };
    let cuts = [0.0, t.min(0.5), 0.5, 0.9, 1.0];
    let (mut num, mut den) = (0.0, 0.0);
    for w in cuts.windows(2) {
        num += simpson(&|u| base(u, 2), w[0], w[1], 1e-13);
        den += simpson(&|u| base(u, 0), w[0], w[1], 1e-13);
    }
    num / den
}

#[test]
fn interval_rule_examples() {
    let ivs = [
        CredibleInterval::from_endpoints(-1.0, 1.0, 0.05),
        CredibleInterval::from_endpoints(0.5, 2.0, 0.05),
        CredibleInterval::from_endpoints(0.0, 2.0, 0.05),
        CredibleInterval::from_endpoints(-3.0, -0.1, 0.05),
    ];
    let sel = select_by_interval(&ivs);
    assert_eq!(sel.selected, vec![false, true, false, true]);
    assert_eq!(sel.method, SelectionMethod::IntervalEB);
    assert_eq!(sel.count(), 2);
}

#[test]
fn threshold_rule_examples() {
    let k = shrinkage_weights(&[0.0], tau(1.0)).unwrap()[0];
    assert!((k - 1.0 / 3.0).abs() < 1e-14, "{k}");
    let t = tau(0.05);
    let sel = select_by_threshold(&[0.0, 10.0, -10.0], t, 0.5).unwrap();
    assert_eq!(sel.selected, vec![false, true, true]);
    let k10 = shrinkage_weights(&[10.0], t).unwrap()[0];
    assert!((1.0 - k10) <= 2.0 / (10.0 * t.zeta()), "{k10}");
    assert!(select_by_threshold(&[1.0], t, 1.0).is_err());
}

#[test]
fn kappa_matches_quadrature_and_increases() {
    for &t in &[0.01, 0.1, 0.7] {
        let ys: Vec<f64> = (0..=60).map(|j| j as f64 * 0.15).collect();
        let ks = shrinkage_weights(&ys, tau(t)).unwrap();
        for (y, k) in ys.iter().zip(&ks) {
            let o = kappa_oracle(*y, t);
            assert!((k - o).abs() <= 1e-9, "tau={t} y={y}: {k} vs {o}");
        }
        assert!(ks.windows(2).all(|w| w[1] > w[0]), "tau={t}");
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        assert_eq!(shrinkage_weights(&neg, tau(t)).unwrap(), ks);
    }
}

#[test]
fn discovery_accounting() {
    use RegionLabel::*;
    let regions = [Small, Small, Large];
    let none = select_by_interval(&[]);
    let mut sel = select_by_threshold(&[0.0, 0.0, 0.0], tau(0.01), 0.5).unwrap();
    assert_eq!(sel.count(), 0);
    assert_eq!(discovery_report(&sel, &[0.0, 0.0, 3.0], &regions).unwrap().fdr, 0.0);

    sel.selected = vec![true, true, true];
    assert_eq!(discovery_report(&sel, &[0.0; 3], &regions).unwrap().fdr, 1.0);

    sel.selected = vec![true, false, true];
    let rep = discovery_report(&sel, &[0.0, 0.0, 3.0], &regions).unwrap();
    assert_eq!(rep.fdr, 0.5);
    assert_eq!(rep.true_discoveries.large, 1);
    assert_eq!(rep.false_positives, 1);
    assert_eq!(rep.detection_fraction(Large), Some(1.0));
    assert_eq!(rep.detection_fraction(Medium), None);

    assert!(discovery_report(&none, &[0.0], &[Small]).is_err());
}

#[test]
fn interval_rule_nests_in_blowup() {
    let ys: Vec<f64> = (0..200).map(|i| (i as f64 * 0.731).sin() * 5.0).collect();
    let t = tau(0.05);
    let mut prev: Option<Vec<bool>> = None;
    for &l in &[0.5, 1.0, 1.5, 2.0, 4.0] {
        let sel = select_by_interval(&interval_batch(&ys, t, 0.05, l).unwrap()).selected;
        if let Some(p) = &prev {
            assert!(sel.iter().zip(p).all(|(&s, &q)| !s || q), "L = {l}");
        }
        prev = Some(sel);
    }
}

#[test]
fn thresholding_selects_more_on_average() {
    // 50 data sets per signal law; thresholding should make at least as
    // many discoveries as the interval rule on average.
    for law in [SignalLaw::LAPLACE, SignalLaw::CAUCHY] {
        let mut cfg = ScenarioConfig::new("sel", 400, 40, SignalSpec::FromDistribution(law));
        cfg.seed = SEED;
        let (mut by_interval, mut by_threshold) = (0usize, 0usize);
        for rep in 0..50 {
            let sc = generate(&cfg, rep).unwrap();
            let t = mmle(&sc.y).unwrap().value;
            by_interval += select_by_interval(&interval_batch(&sc.y, t, 0.05, 1.0).unwrap()).count();
            by_threshold += select_by_threshold(&sc.y, t, 0.5).unwrap().count();
        }
        assert!(by_threshold >= by_interval, "{law:?}: {by_threshold} < {by_interval}");
    }
}

#![cfg(feature = "parallel")]

use hsuq::credible::{ball_radius, interval_batch};
use hsuq::experiments::{run_scenario, HbSettings, MethodSpec, ScenarioConfig, SignalSpec};
use hsuq::tau::mmle;
use hsuq::{par, GlobalScale};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let ys: Vec<f64> = (0..3000).map(|i| if i % 50 == 0 { 6.0 } else { (i as f64 * 0.618).sin() * 1.5 }).collect();
    let t = GlobalScale::new(0.03).unwrap();
    let work = || {
        assert!(par::threads() >= 1);
        let tau = mmle(&ys).unwrap();
        let iv = interval_batch(&ys, t, 0.05, 1.0).unwrap();
        let ball = ball_radius(&ys, t, 0.05, 1000, 9).unwrap();
        (tau, iv, ball)
    };
    let one = in_pool(1, work);
    let four = in_pool(4, work);
    assert_eq!(in_pool(1, par::threads), 1);
    assert_eq!(one, four);
}

#[test]
fn scenario_report_does_not_depend_on_thread_count() {
    let mut cfg = ScenarioConfig::new("par", 200, 10, SignalSpec::NormalAround(4.0));
    cfg.seed = 5;
    cfg.reps = 4;
    cfg.methods = vec![MethodSpec::EbMmle, MethodSpec::HbCauchy];
    cfg.hb = HbSettings { iters: 500, burn_in: 100, thin: 1 };
    cfg.ball_draws = Some(1000);
    let run = || {
        let mut buf = Vec::new();
        run_scenario(&cfg).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(in_pool(1, run), in_pool(3, run));
}

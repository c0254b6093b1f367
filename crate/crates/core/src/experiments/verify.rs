//! Numerical checks of the theory, each with pinned thresholds. Every check
//! reports its measured values next to the bounds they are held to.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::credible::{self, region_blowups};
use crate::error::{Error, Result};
use crate::hierarchical::{self, batch_means_se, quantile_mc_se, ChainOptions, HyperPrior};
use crate::kernels::{self, Kernels, LikelihoodBatch, SCORE_UPPER_BOUND};
use crate::numeric::quad::{self, Tolerance};
use crate::numeric::special::norm_quantile;
use crate::numeric::{order_statistic, pairwise_sum};
use crate::posterior::CoordinatePosterior;
use crate::rng;
use crate::scale::{GlobalScale, KernelOrder, SparsityRate};
use crate::tau;

use super::config::{MethodSpec, ScenarioConfig, SignalSpec};
use super::report::run_scenario;
use super::scenario::generate;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 2017;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyParams {
    pub seed: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { seed: DEFAULT_SEED }
    }
}

/// A measured value and the closed range it must fall in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Measurement {
    fn new(name: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let passed = !value.is_nan() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Measurement {
            name: name.into(),
            value,
            lower,
            upper,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::new(name, value, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self::new(name, value, Some(lower), None)
    }

    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self::new(name, value, Some(lower), Some(upper))
    }

    /// Reported only.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Measurement {
            name: name.into(),
            value,
            lower: None,
            upper: None,
            passed: true,
        }
    }

    pub fn is_info(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:.6e}", self.name, self.value)?;
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => write!(f, " in [{l:.6e}, {u:.6e}]")?,
            (Some(l), None) => write!(f, " >= {l:.6e}")?,
            (None, Some(u)) => write!(f, " <= {u:.6e}")?,
            (None, None) => return Ok(()),
        }
        f.write_str(if self.passed { " ok" } else { " FAILED" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl CheckOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &Measurement> {
        self.measurements.iter().filter(|m| !m.passed)
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} ({:.1} s)", if self.passed { "PASS" } else { "FAIL" }, self.check, self.elapsed_secs)?;
        for m in &self.measurements {
            writeln!(f, "  {m}")?;
        }
        Ok(())
    }
}

type CheckFn = fn(&VerifyParams, u64) -> Result<Vec<Measurement>>;

pub struct CheckInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Wall-clock budget in seconds, when the check has one.
    pub time_limit: Option<f64>,
    run: CheckFn,
}

static REGISTRY: [CheckInfo; 13] = [
    CheckInfo {
        name: "kernel-identities",
        summary: "I_k'(y) = y I_{k+1}(y) by central differences on a 41x4 grid; density integrates to one",
        time_limit: Some(10.0),
        run: kernel_identities,
    },
    CheckInfo {
        name: "oracle-equivalence",
        summary: "posterior mean and variance against nested (theta, lambda) quadrature; cdf against 1e7 exact draws",
        time_limit: None,
        run: oracle_equivalence,
    },
    CheckInfo {
        name: "score-lemma",
        summary: "bounds and monotonicity of m_tau, and its values at 0 and at zeta_tau",
        time_limit: None,
        run: score_lemma,
    },
    CheckInfo {
        name: "ball-radius-bound",
        summary: "credible-ball radius at least 0.5 sqrt(n tau zeta_tau) under theta0 = 0",
        time_limit: Some(120.0),
        run: ball_radius_bound,
    },
    CheckInfo {
        name: "moment-constant",
        summary: "sum of posterior variances over n tau zeta_tau near (2/pi)^{3/2} under theta0 = 0",
        time_limit: None,
        run: moment_constant,
    },
    CheckInfo {
        name: "region-coverage",
        summary: "interval coverage in the small, medium and large regions at tau = 0.01",
        time_limit: None,
        run: region_coverage,
    },
    CheckInfo {
        name: "coverage-study",
        summary: "coverage of empirical Bayes intervals, n = 400, p = 20, N(2 sqrt(2 log n), 1) signals",
        time_limit: None,
        run: coverage_study,
    },
    CheckInfo {
        name: "selection-fdr",
        summary: "false discovery rates and detection of the interval and thresholding rules",
        time_limit: None,
        run: selection_fdr,
    },
    CheckInfo {
        name: "mmle-correctness",
        summary: "MMLE against a 1e4-point grid search, all-zero data, and the two-group scenario",
        time_limit: None,
        run: mmle_correctness,
    },
    CheckInfo {
        name: "gibbs-exactness",
        summary: "fixed-tau Gibbs chain against quadrature means and 95% quantiles",
        time_limit: Some(60.0),
        run: gibbs_exactness,
    },
    CheckInfo {
        name: "posterior-bounds",
        summary: "posterior mean, variance and radius bounds for large and null observations",
        time_limit: None,
        run: posterior_bounds,
    },
    CheckInfo {
        name: "expansions",
        summary: "incomplete-gamma expansion of H_k and the large-y behaviour of I_k",
        time_limit: None,
        run: expansions,
    },
    CheckInfo {
        name: "hyperprior",
        summary: "support and mass conditions for the truncated hyperpriors at n = 400, p = 60",
        time_limit: None,
        run: hyperprior,
    },
];

pub fn registry() -> &'static [CheckInfo] {
    &REGISTRY
}

/// Runs the named check.
pub fn verify_theory(name: &str, params: &VerifyParams) -> Result<CheckOutcome> {
    let (idx, info) = REGISTRY
        .iter()
        .enumerate()
        .find(|(_, c)| c.name == name)
        .ok_or_else(|| Error::UnknownCheck(name.to_string()))?;
    let start = Instant::now();
    let mut measurements = (info.run)(params, rng::child_seed(params.seed, idx as u64))?;
    let elapsed_secs = start.elapsed().as_secs_f64();
    if let Some(limit) = info.time_limit {
        measurements.push(Measurement::at_most("runtime_secs", elapsed_secs, limit));
    }
    Ok(CheckOutcome {
        check: name.to_string(),
        passed: measurements.iter().all(|m| m.passed),
        measurements,
        elapsed_secs,
    })
}

fn scale(t: f64) -> GlobalScale {
    GlobalScale::clamped(t, f64::MIN_POSITIVE)
}

fn normal_sample(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, 0);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

fn kernel_identities(_: &VerifyParams, _: u64) -> Result<Vec<Measurement>> {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for t in [1e-4, 1e-2, 0.5, 1.0] {
        let tau = scale(t);
        for j in 0..41 {
            let y = -10.0 + 0.5 * j as f64;
            let (kp, km, k0) = (Kernels::new(y + h, tau)?, Kernels::new(y - h, tau)?, Kernels::new(y, tau)?);
            for k in [KernelOrder::MinusHalf, KernelOrder::Half, KernelOrder::ThreeHalves, KernelOrder::FiveHalves] {
                let next = k.succ().expect("orders below 7/2 have a successor");
                // Scaled by exp(-y^2/2) throughout to stay in range.
                let shift = 0.5 * y * y;
                let fd = ((kp.log_i(k) - shift).exp() - (km.log_i(k) - shift).exp()) / (2.0 * h);
                let exact = y * (k0.log_i(next) - shift).exp();
                let err = if y == 0.0 {
                    fd.abs() / (k0.log_i(k) - shift).exp()
                } else {
                    (fd - exact).abs() / exact.abs()
                };
                worst = worst.max(err);
            }
        }
    }
    let mut out = vec![Measurement::at_most("derivative_identity_max_rel_err", worst, 1e-5)];
    for t in [1e-4, 1e-2, 0.05, 0.5, 1.0] {
        let mass = density_mass(scale(t))?;
        out.push(Measurement::at_most(format!("density_mass_error_tau_{t}"), (mass - 1.0).abs(), 1e-8));
    }
    Ok(out)
}

/// `∫ psi_tau(y) dy`, as twice the integral over `[0, 40]` plus the tail in
/// `s = 40 / y`.
fn density_mass(tau: GlobalScale) -> Result<f64> {
    let f = |y: f64| kernels::marginal_density(y, tau).unwrap_or(f64::NAN);
    let z = tau.zeta();
    let mut breaks = vec![0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];
    if z > 0.0 {
        breaks.extend([0.5 * z, z, z + 2.0]);
    }
    breaks.sort_by(f64::total_cmp);
    let tol = Tolerance::new(1e-14, 1e-12);
    let (body, _) = quad::integrate_scalar(f, &breaks, tol, "density mass")?;
    let (tail, _) = quad::integrate_scalar(|s| f(40.0 / s) * 40.0 / (s * s), &[0.0, 0.1, 0.5, 1.0], tol, "density tail")?;
    Ok(2.0 * (body + tail))
}

/// `[E theta, E theta^2]` under the horseshoe posterior, by integrating
/// `theta` against `phi(y - theta) N(theta; 0, tau^2 lambda^2)` and then
/// `lambda` against the half-Cauchy, written as `lambda = tan(pi w / 2)` with
/// `w` uniform.
pub fn brute_force_moments(y: f64, tau: f64) -> Result<(f64, f64)> {
    // The normaliser is at least of order phi(y).
    let floor = 1e-15 * (-0.5 * y * y).exp();
    let inner = |w: f64| -> [f64; 3] {
        let s = tau * (0.5 * PI * w).tan();
        let s2 = s * s;
        let centre = y * s2 / (1.0 + s2);
        let sd = (s2 / (1.0 + s2)).sqrt();
        let g = |th: f64| {
            let d = (-(y - th) * (y - th) / 2.0 - th * th / (2.0 * s2)).exp() / (2.0 * PI * s);
            [d, th * d, th * th * d]
        };
        let br: Vec<f64> = [-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0].iter().map(|k| centre + k * sd).collect();
        match quad::integrate(g, &br, Tolerance::new(floor, 1e-13), "oracle inner") {
            Ok(e) => e.value,
            Err(_) => [f64::NAN; 3],
        }
    };
    let mut br = vec![0.0, 1.0];
    for sb in [1e-3, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0, 1e3] {
        br.push((sb / tau).atan() * 2.0 / PI);
    }
    br.sort_by(f64::total_cmp);
    br.dedup();
    let e = quad::integrate(inner, &br, Tolerance::new(10.0 * floor, 1e-12), "oracle outer")?;
    let [n0, n1, n2] = e.value;
    if !(n0 > 0.0) || !n1.is_finite() || !n2.is_finite() {
        return Err(Error::Numerical {
            context: "oracle",
            estimate: f64::NAN,
        });
    }
    let m = n1 / n0;
    Ok((m, n2 / n0 - m * m))
}

fn oracle_equivalence(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let (mut dm, mut dv): (f64, f64) = (0.0, 0.0);
    for y in [0.0, 1.0, 2.5, 4.0, 7.0] {
        for t in [1e-3, 1e-2, 0.05, 0.3, 1.0] {
            let (m, v) = brute_force_moments(y, t)?;
            let k = Kernels::new(y, scale(t))?;
            dm = dm.max((k.posterior_mean() - m).abs());
            dv = dv.max((k.posterior_variance() - v).abs());
        }
    }
    let mut out = vec![
        Measurement::at_most("mean_max_abs_err", dm, 1e-6),
        Measurement::at_most("variance_max_abs_err", dv, 1e-6),
    ];
    let post = CoordinatePosterior::new(3.0, scale(0.1))?;
    let probes = [0.0, 0.75, 1.5, 2.5, 3.5];
    let draws = 10_000_000usize;
    let mut counts = [0usize; 5];
    let mut r = rng::stream(seed, 0);
    for _ in 0..draws {
        let x = post.rand_draw(&mut r);
        for (c, &p) in counts.iter_mut().zip(&probes) {
            if x <= p {
                *c += 1;
            }
        }
    }
    for (c, &p) in counts.iter().zip(&probes) {
        let f = post.cdf(p)?;
        let se = (f * (1.0 - f) / draws as f64).sqrt();
        let z = (*c as f64 / draws as f64 - f).abs() / se;
        out.push(Measurement::at_most(format!("cdf_at_{p}_binomial_se"), z, 4.0));
    }
    Ok(out)
}

fn score_lemma(_: &VerifyParams, _: u64) -> Result<Vec<Measurement>> {
    let (mut lo, mut hi): (f64, f64) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut drop: f64 = 0.0;
    for e in 0..=24 {
        let tau = scale(10f64.powf(-6.0 + 0.25 * e as f64));
        let mut prev = f64::NEG_INFINITY;
        for j in 0..=1200 {
            let y = 0.05 * j as f64;
            let m = kernels::score_m(y, tau)?;
            lo = lo.min(m);
            hi = hi.max(m);
            if y <= 20.0 {
                drop = drop.max(prev - m);
                prev = m;
            }
        }
    }
    let t = 1e-4;
    let tau = scale(t);
    let z = tau.zeta();
    Ok(vec![
        Measurement::at_least("min_score", lo, -1.0),
        // The bound is the scan maximum; the slack is the kernel round-off.
        Measurement::at_most("max_score", hi, SCORE_UPPER_BOUND + 1e-12),
        Measurement::at_most("largest_decrease_on_0_20", drop, 1e-12),
        Measurement::within("m0_over_minus_2tau_over_pi", kernels::score_m(0.0, tau)? / (-2.0 * t / PI), 0.95, 1.05),
        Measurement::within("m_zeta_times_pi_zeta2_over_2", kernels::score_m(z, tau)? * PI * z * z / 2.0, 0.85, 1.15),
    ])
}

fn ball_radius_bound(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let (n, t, alpha, draws, reps) = (5000usize, 0.01, 0.05, 2000usize, 50usize);
    let tau = scale(t);
    let bound = 0.5 * (n as f64 * t * tau.zeta()).sqrt();
    let mut held = 0;
    let mut smallest = f64::INFINITY;
    for rep in 0..reps {
        let s = rng::child_seed(seed, rep as u64);
        let ys = normal_sample(n, s);
        let (r, _) = credible::ball_radius(&ys, tau, alpha, draws, rng::child_seed(s, 1))?;
        smallest = smallest.min(r);
        if r >= bound {
            held += 1;
        }
    }
    Ok(vec![
        Measurement::info("bound", bound),
        Measurement::info("smallest_radius", smallest),
        Measurement::at_least("fraction_bound_holds", held as f64 / reps as f64, 0.95),
    ])
}

fn moment_constant(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let (n, t) = (100_000usize, 1e-4);
    let tau = scale(t);
    let ys = normal_sample(n, seed);
    let vars = crate::par::try_map_slice(&ys, |i, &y| kernels::posterior_variance(y, tau).map_err(|e| e.at(i)))?;
    let norm = n as f64 * t * tau.zeta();
    let ratio = pairwise_sum(&vars) / norm;
    let c = (2.0 / PI).powf(1.5);
    // Exact expectation of the statistic, for reference.
    let z = tau.zeta();
    let (exact, _) = quad::integrate_scalar(
        |y| 2.0 * kernels::posterior_variance(y, tau).unwrap_or(f64::NAN) * crate::numeric::special::norm_pdf(y),
        &[0.0, 1.0, 0.5 * z, z, z + 1.0, z + 3.0, 12.0, 40.0],
        Tolerance::new(1e-14, 1e-12),
        "moment constant",
    )?;
    Ok(vec![
        Measurement::info("expected_ratio", exact / (t * z)),
        Measurement::within("ratio", ratio, 0.8 * c, 1.2 * c),
    ])
}

fn region_coverage(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let (n, t, alpha, gamma) = (10_000usize, 0.01, 0.05, 0.1);
    let tau = scale(t);
    let z = tau.zeta();
    let third = n / 3;
    let theta: Vec<f64> = (0..n)
        .map(|i| match i {
            i if i < third => 0.0,
            i if i < 2 * third => 0.5 * z,
            _ => 1.5 * z,
        })
        .collect();
    let noise = normal_sample(n, seed);
    let ys: Vec<f64> = theta.iter().zip(&noise).map(|(a, b)| a + b).collect();
    let ivs = credible::interval_batch(&ys, tau, alpha, 1.0)?;
    let (ls, ll) = region_blowups(alpha, gamma, 1.0)?;
    let frac = |range: std::ops::Range<usize>, l: f64| {
        let len = range.len() as f64;
        range.filter(|&i| ivs[i].with_blowup(l).contains(theta[i])).count() as f64 / len
    };
    Ok(vec![
        Measurement::info("blowup_small", ls),
        Measurement::info("blowup_large", ll),
        Measurement::at_least("covered_small", frac(0..third, ls), 0.9),
        Measurement::at_most("covered_medium", frac(third..2 * third, 1.0), 0.1),
        Measurement::at_least("covered_large", frac(2 * third..n, ll), 0.9),
    ])
}

fn coverage_study(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let n = 400;
    let a = 2.0 * (2.0 * (n as f64).ln()).sqrt();
    let mut cfg = ScenarioConfig::new("coverage", n, 20, SignalSpec::NormalAround(a));
    cfg.reps = 100;
    cfg.seed = seed;
    cfg.methods = vec![MethodSpec::EbMmle, MethodSpec::EbSimple];
    let report = run_scenario(&cfg)?;
    let (mmle, simple) = (&report.methods[0], &report.methods[1]);
    let nz = |c: Option<f64>| c.unwrap_or(f64::NAN);
    let mmle_nz = nz(mmle.coverage.nonzero);
    Ok(vec![
        Measurement::at_least("mmle_zero_coverage", nz(mmle.coverage.zero), 0.93),
        Measurement::at_least("mmle_nonzero_coverage", mmle_nz, 0.80),
        Measurement::info("simple_nonzero_coverage", nz(simple.coverage.nonzero)),
        Measurement::info("mmle_mean_tau", mmle.mean_tau),
        Measurement::info("simple_mean_tau", simple.mean_tau),
        // Strictly below: a positive margin is required.
        Measurement::new("mmle_minus_simple_nonzero_coverage", mmle_nz - nz(simple.coverage.nonzero), Some(f64::MIN_POSITIVE), None),
    ])
}

fn selection_fdr(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let (n, p) = (800, 120);
    let groups = SignalSpec::three_group(p);
    let counts = match groups {
        SignalSpec::ThreeGroup { counts } => counts,
        _ => unreachable!(),
    };
    let mut cfg = ScenarioConfig::new("three-group", n, p, groups);
    cfg.reps = 50;
    cfg.seed = rng::child_seed(seed, 0);
    cfg.methods = vec![MethodSpec::EbMmle];
    let three = run_scenario(&cfg)?;
    let m = &three.methods[0];
    let sm = |r: &super::report::RuleSummary| {
        let td = r.true_discoveries.small.unwrap_or(0.0) + r.true_discoveries.medium.unwrap_or(0.0);
        td / (counts[0] + counts[1]) as f64
    };
    let mut cauchy = ScenarioConfig::new("cauchy", n, p, SignalSpec::FromDistribution(super::config::SignalLaw::CAUCHY));
    cauchy.reps = 50;
    cauchy.seed = rng::child_seed(seed, 1);
    cauchy.methods = vec![MethodSpec::EbMmle];
    let c = run_scenario(&cauchy)?;
    Ok(vec![
        Measurement::at_most("interval_fdr_three_group", m.interval_rule.fdr, 0.05 - f64::EPSILON),
        Measurement::info("threshold_fdr_three_group", m.threshold_rule.fdr),
        Measurement::at_least("threshold_fdr_cauchy", c.methods[0].threshold_rule.fdr, 0.10 + f64::EPSILON),
        Measurement::info("interval_fdr_cauchy", c.methods[0].interval_rule.fdr),
        Measurement::at_least("interval_large_detection", m.interval_rule.detection.large.unwrap_or(f64::NAN), 0.9),
        Measurement::at_least("threshold_large_detection", m.threshold_rule.detection.large.unwrap_or(f64::NAN), 0.9),
        Measurement::at_most("interval_small_medium_detection", sm(&m.interval_rule), 0.1),
    ])
}

fn mmle_correctness(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let grid_points = 10_000usize;
    let mut worst_steps: f64 = 0.0;
    for d in 0..20u64 {
        let n = 400;
        let p = 5 + 4 * d as usize;
        let c = [0.5, 1.0, 2.0][d as usize % 3];
        let mut cfg = ScenarioConfig::new("mmle", n, p, SignalSpec::NormalAround(c * (2.0 * (n as f64).ln()).sqrt()));
        cfg.seed = rng::child_seed(seed, d);
        let ys = generate(&cfg, 0)?.y;
        let est = tau::mmle(&ys)?.tau();
        let batch = LikelihoodBatch::new(&ys)?;
        let lo = (1.0 / n as f64).ln();
        let step = -lo / (grid_points - 1) as f64;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for j in 0..grid_points {
            let t = if j + 1 == grid_points { 1.0 } else { (lo + step * j as f64).exp() };
            let (ll, _) = batch.evaluate(scale(t))?;
            if ll > best.0 {
                best = (ll, t);
            }
        }
        worst_steps = worst_steps.max((est.ln() - best.1.ln()).abs() / step);
    }
    let zeros = tau::mmle(&[0.0; 400])?.tau();
    let mut fig = ScenarioConfig::new("two-group", 200, 10, SignalSpec::Groups(vec![(5, 7.0), (5, 1.5)]));
    let mut inside = 0;
    for s in 0..50u64 {
        fig.seed = rng::child_seed(seed, 100 + s);
        let t = tau::mmle(&generate(&fig, 0)?.y)?.tau();
        if (0.03..=0.3).contains(&t) {
            inside += 1;
        }
    }
    Ok(vec![
        Measurement::at_most("max_distance_to_grid_argmax_in_spacings", worst_steps, 1.0),
        Measurement::within("all_zero_minus_one_over_n", zeros - 1.0 / 400.0, 0.0, 0.0),
        Measurement::at_least("two_group_fraction_in_range", inside as f64 / 50.0, 0.9),
    ])
}

fn gibbs_exactness(_: &VerifyParams, seed: u64) -> Result<Vec<Measurement>> {
    let t = 0.1;
    let tau = scale(t);
    let mut cfg = ScenarioConfig::new("gibbs", 50, 10, SignalSpec::NormalAround((2.0 * 50f64.ln()).sqrt()));
    cfg.seed = rng::child_seed(seed, 0);
    let ys = generate(&cfg, 0)?.y;
    let chain = hierarchical::run_chain(
        &ys,
        HyperPrior::PointMass(tau),
        ChainOptions {
            iters: 11_000,
            burn_in: 1_000,
            thin: 1,
            seed: rng::child_seed(seed, 1),
        },
    )?;
    let (mut worst_mean, mut worst_q): (f64, f64) = (0.0, 0.0);
    for (i, &y) in ys.iter().enumerate() {
        let post = CoordinatePosterior::new(y, tau)?;
        let xs = chain.coordinate(i);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        worst_mean = worst_mean.max((mean - post.mean()).abs() / batch_means_se(&xs));
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        for p in [0.025, 0.975] {
            let q = post.quantile(p)?;
            let se = quantile_mc_se(&xs, p, post.density(q)?);
            worst_q = worst_q.max((order_statistic(&sorted, p) - q).abs() / se);
        }
    }
    Ok(vec![
        Measurement::info("kept_draws", chain.len() as f64),
        Measurement::at_most("worst_mean_error_in_mc_se", worst_mean, 3.0),
        Measurement::at_most("worst_quantile_error_in_mc_se", worst_q, 3.0),
    ])
}

fn posterior_bounds(_: &VerifyParams, _: u64) -> Result<Vec<Measurement>> {
    let t1 = scale(0.1);
    let t2 = scale(1e-3);
    let t3 = scale(1e-4);
    let r0 = CoordinatePosterior::new(0.0, t3)?.interval_radius(0.05)?;
    let z_alpha = norm_quantile(0.95);
    Ok(vec![
        Measurement::at_most("mean_gap_y10_tau0.1", (kernels::posterior_mean(10.0, t1)? - 10.0).abs(), 2.0 / t1.zeta()),
        Measurement::at_most("variance_gap_y8_tau1e-3", (kernels::posterior_variance(8.0, t2)? - 1.0).abs(), t2.zeta().powi(-2)),
        Measurement::at_most("score_gap_y6_tau1e-3", (kernels::score_m(6.0, t2)? - 1.0).abs(), t2.zeta().powi(-2)),
        Measurement::at_least("radius_y0_over_z_alpha_tau_half", r0 / (z_alpha * 1e-4 / 2.0), 0.9),
    ])
}

fn expansions(_: &VerifyParams, _: u64) -> Result<Vec<Measurement>> {
    let h = kernels::expansion_hk(10.0, KernelOrder::Half)?;
    let target = 50f64.exp() / 50.0;
    // I_{1/2}(y) against e^{y^2/2} / (y^2/2) at tau = 1e-3 and y = 30.
    let li = kernels::log_integral_ik(30.0, scale(1e-3), KernelOrder::Half)?;
    Ok(vec![
        Measurement::within("h_half_y10_over_leading", h / target, 0.95, 1.05),
        Measurement::within("i_half_y30_over_leading", (li - 450.0 + 450f64.ln()).exp(), 0.95, 1.05),
    ])
}

fn hyperprior(_: &VerifyParams, _: u64) -> Result<Vec<Measurement>> {
    let (n, p) = (400, 60);
    let rate = SparsityRate::new(n, p)?;
    let tc = hierarchical::verify_hyperprior(&HyperPrior::truncated_cauchy(n), rate, SCORE_UPPER_BOUND)?;
    let tu = hierarchical::verify_hyperprior(&HyperPrior::truncated_uniform(n), rate, SCORE_UPPER_BOUND)?;
    let lo = 1.0 / n as f64;
    let closed = (tc.t_n.min(1.0).atan() - (0.5 * tc.t_n).max(lo).atan()).max(0.0) / (1f64.atan() - lo.atan());
    Ok(vec![
        Measurement::within("tcauchy_support", f64::from(tc.cond2 as u8), 1.0, 1.0),
        Measurement::within("tuniform_support", f64::from(tu.cond2 as u8), 1.0, 1.0),
        Measurement::at_most("tcauchy_mass_vs_arctan", (tc.cond3_mass - closed).abs(), 1e-12),
        Measurement::at_most("tcauchy_rate", tc.cond3_rate, SCORE_UPPER_BOUND / 2.0),
        Measurement::info("tcauchy_mass_over_t_n", tc.cond4_ratio),
    ])
}

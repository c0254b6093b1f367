//! Full Bayes with a hyperprior on `tau`: a Gibbs sampler for the horseshoe
//! hierarchy and summaries of its output.
//!
//! Half-Cauchy scales are written as inverse-gamma mixtures,
//! `lambda^2 | nu ~ IG(1/2, 1/nu)` with `nu ~ IG(1/2, 1)`, and likewise for
//! `tau^2` with auxiliary `xi`, so every full conditional is standard.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::Serialize;

use crate::credible::{CredibleBall, CredibleInterval};
use crate::error::{Error, Result};
use crate::numeric::quad::{self, Tolerance};
use crate::numeric::special::truncated_gamma_inverse;
use crate::numeric::{order_statistic, pairwise_sum, quantile_standard_error};
use crate::rng::{self, StreamRng};
use crate::scale::{GlobalScale, SparsityRate, UnboundedScale};
use crate::tau::simple_estimator;

/// Fewest kept draws accepted by the chain summaries.
pub const MIN_CHAIN_DRAWS: usize = 100;
pub const DEFAULT_ITERS: usize = 12_000;
pub const DEFAULT_BURN_IN: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HyperPrior {
    /// Half-Cauchy on `(0, inf)`.
    HalfCauchy,
    /// Half-Cauchy restricted to `[lo, hi]`.
    TruncatedHalfCauchy { lo: f64, hi: f64 },
    /// Uniform on `[lo, hi]`.
    TruncatedUniform { lo: f64, hi: f64 },
    /// `tau` fixed.
    PointMass(GlobalScale),
}

impl HyperPrior {
    /// Half-Cauchy truncated to `[1/n, 1]`.
    pub fn truncated_cauchy(n: usize) -> Self {
        HyperPrior::TruncatedHalfCauchy {
            lo: 1.0 / n as f64,
            hi: 1.0,
        }
    }

    /// Uniform on `[1/n, 1]`.
    pub fn truncated_uniform(n: usize) -> Self {
        HyperPrior::TruncatedUniform {
            lo: 1.0 / n as f64,
            hi: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HyperPrior::HalfCauchy => "cauchy",
            HyperPrior::TruncatedHalfCauchy { .. } => "tcauchy",
            HyperPrior::TruncatedUniform { .. } => "tuniform",
            HyperPrior::PointMass(_) => "point",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            HyperPrior::TruncatedHalfCauchy { lo, hi } | HyperPrior::TruncatedUniform { lo, hi } => {
                if lo > 0.0 && lo < hi && hi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::domain(format!("invalid prior support [{lo}, {hi}]")))
                }
            }
            _ => Ok(()),
        }
    }

    /// Support of `tau`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            HyperPrior::HalfCauchy => (0.0, f64::INFINITY),
            HyperPrior::TruncatedHalfCauchy { lo, hi } | HyperPrior::TruncatedUniform { lo, hi } => (lo, hi),
            HyperPrior::PointMass(t) => (t.get(), t.get()),
        }
    }

    /// Prior density of `tau` (not defined for the point mass).
    pub fn density(&self, tau: f64) -> f64 {
        let cauchy = |t: f64| 2.0 / (PI * (1.0 + t * t));
        match *self {
            HyperPrior::HalfCauchy => {
                if tau >= 0.0 {
                    cauchy(tau)
                } else {
                    0.0
                }
            }
            HyperPrior::TruncatedHalfCauchy { lo, hi } => {
                if tau < lo || tau > hi {
                    0.0
                } else {
                    cauchy(tau) / ((2.0 / PI) * (hi.atan() - lo.atan()))
                }
            }
            HyperPrior::TruncatedUniform { lo, hi } => {
                if tau < lo || tau > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            HyperPrior::PointMass(_) => f64::NAN,
        }
    }

    /// Prior probability of `[a, b]`, by quadrature for the continuous priors.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        match *self {
            HyperPrior::PointMass(t) => Ok(if t.get() >= a && t.get() <= b { 1.0 } else { 0.0 }),
            _ => {
                let (lo, hi) = self.support();
                let (a, b) = (a.max(lo), b.min(hi));
                if b <= a {
                    return Ok(0.0);
                }
                let (v, _) = quad::integrate_scalar(|t| self.density(t), &[a, b], Tolerance::new(1e-14, 1e-12), "prior mass")?;
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub theta: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub nu: Vec<f64>,
    pub tau2: f64,
    pub xi: f64,
}

impl GibbsState {
    /// `theta = Y`, `lambda^2 = nu = xi = 1` and `tau` from the simple
    /// estimator clamped into the prior support (or the fixed value).
    pub fn initial(ys: &[f64], prior: &HyperPrior) -> Result<Self> {
        let n = ys.len();
        let tau = match *prior {
            HyperPrior::PointMass(t) => t.get(),
            _ => {
                let (lo, hi) = prior.support();
                let start = if n >= 2 { simple_estimator(ys, 2.0, 1.0)?.tau() } else { 0.5 };
                start.clamp(lo, hi)
            }
        };
        Ok(GibbsState {
            theta: ys.to_vec(),
            lambda2: vec![1.0; n],
            nu: vec![1.0; n],
            tau2: tau * tau,
            xi: 1.0,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau2.sqrt()
    }
}

/// `IG(1, b)` draw.
#[inline]
fn inv_gamma_1<R: Rng + ?Sized>(rng: &mut R, b: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    b / e
}

/// One full sweep. Returns whether the `tau^2` draw had to be clamped into
/// the prior support after inverse-CDF round-off.
pub fn gibbs_step<R: Rng + ?Sized>(state: &mut GibbsState, ys: &[f64], prior: &HyperPrior, rng: &mut R) -> Result<bool> {
    let n = ys.len();
    if state.theta.len() != n || state.lambda2.len() != n || state.nu.len() != n {
        return Err(Error::LengthMismatch {
            left: state.theta.len(),
            right: n,
        });
    }
    let tau2 = state.tau2;
    let mut quad_sum = Vec::with_capacity(n);
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        let s = state.lambda2[i] * tau2;
        let w = s / (1.0 + s);
        let e: f64 = rng.sample(StandardNormal);
        let th = w * ys[i] + w.sqrt() * e;
        state.theta[i] = th;
        let l2 = inv_gamma_1(rng, 1.0 / state.nu[i] + th * th / (2.0 * tau2));
        state.lambda2[i] = l2;
        state.nu[i] = inv_gamma_1(rng, 1.0 + 1.0 / l2);
        quad_sum.push(th * th / (2.0 * l2));
    }
    let s = pairwise_sum(&quad_sum);
    let nf = n as f64;
    let mut clamped = false;
    match *prior {
        HyperPrior::PointMass(_) => {}
        HyperPrior::HalfCauchy => {
            let rate = 1.0 / state.xi + s;
            let g = Gamma::new(0.5 * (nf + 1.0), 1.0 / rate)
                .map_err(|e| Error::domain(e.to_string()))?
                .sample(rng);
            state.tau2 = 1.0 / g;
            state.xi = inv_gamma_1(rng, 1.0 + 1.0 / state.tau2);
        }
        HyperPrior::TruncatedHalfCauchy { lo, hi } => {
            let rate = 1.0 / state.xi + s;
            (state.tau2, clamped) = truncated_inv_gamma(rng, 0.5 * (nf + 1.0), rate, lo * lo, hi * hi);
            state.xi = inv_gamma_1(rng, 1.0 + 1.0 / state.tau2);
        }
        HyperPrior::TruncatedUniform { lo, hi } => {
            (state.tau2, clamped) = truncated_inv_gamma(rng, 0.5 * (nf - 1.0), s, lo * lo, hi * hi);
        }
    }
    Ok(clamped)
}

/// `IG(shape, rate)` restricted to `[lo, hi]`, through the gamma law of the
/// reciprocal.
fn truncated_inv_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64, lo: f64, hi: f64) -> (f64, bool) {
    let u: f64 = rng.random();
    let x = truncated_gamma_inverse(shape, rate / hi, rate / lo, u);
    let v = rate / x;
    if v < lo || v > hi || !v.is_finite() {
        (v.clamp(lo, hi), true)
    } else {
        (v, false)
    }
}

/// Kept draws of a Gibbs run.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    n: usize,
    /// Row-major, one row of `n` means per kept draw.
    theta: Vec<f64>,
    tau: Vec<f64>,
    /// Chain average of `lambda_i^2 tau^2 / (1 + lambda_i^2 tau^2)`.
    shrink: Vec<f64>,
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub prior: HyperPrior,
    /// Sweeps where the truncated `tau^2` draw was clamped into the support.
    pub clamped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            iters: DEFAULT_ITERS,
            burn_in: DEFAULT_BURN_IN,
            thin: 1,
            seed: 0,
        }
    }
}

pub fn run_chain(ys: &[f64], prior: HyperPrior, opts: ChainOptions) -> Result<Chain> {
    prior.validate()?;
    if ys.is_empty() {
        return Err(Error::domain("need at least one observation"));
    }
    let ChainOptions { iters, burn_in, thin, seed } = opts;
    if iters <= burn_in || thin == 0 {
        return Err(Error::domain(format!(
            "need iters > burn_in and thin >= 1, got iters = {iters}, burn_in = {burn_in}, thin = {thin}"
        )));
    }
    let n = ys.len();
    let kept = (iters - burn_in) / thin;
    let mut rng: StreamRng = rng::stream(seed, 0);
    let mut state = GibbsState::initial(ys, &prior)?;
    let mut theta = Vec::with_capacity(kept * n);
    let mut tau = Vec::with_capacity(kept);
    let mut shrink = vec![0.0; n];
    let mut clamped = 0;
    for it in 0..iters {
        if gibbs_step(&mut state, ys, &prior, &mut rng)? {
            clamped += 1;
        }
        if it >= burn_in && (it - burn_in + 1) % thin == 0 && tau.len() < kept {
            theta.extend_from_slice(&state.theta);
            tau.push(state.tau());
            for (acc, &l2) in shrink.iter_mut().zip(&state.lambda2) {
                let s = l2 * state.tau2;
                *acc += s / (1.0 + s);
            }
        }
    }
    let count = tau.len().max(1) as f64;
    shrink.iter_mut().for_each(|s| *s /= count);
    Ok(Chain {
        n,
        theta,
        tau,
        shrink,
        iters,
        burn_in,
        thin,
        seed,
        prior,
        clamped,
    })
}

impl Chain {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn draw(&self, s: usize) -> &[f64] {
        &self.theta[s * self.n..(s + 1) * self.n]
    }

    /// Rao-Blackwellised `E[theta_i | Y] / Y_i`, stable near `Y_i = 0`
    /// where the ratio of the chain mean to `Y_i` is not.
    pub fn shrinkage_weights(&self) -> &[f64] {
        &self.shrink
    }

    pub fn tau_draws(&self) -> &[f64] {
        &self.tau
    }

    pub fn tau_scales(&self) -> Result<Vec<UnboundedScale>> {
        self.tau.iter().map(|&t| UnboundedScale::new(t)).collect()
    }

    /// Draws of coordinate `i`.
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|s| self.theta[s * self.n + i]).collect()
    }

    fn require_draws(&self) -> Result<()> {
        if self.len() < MIN_CHAIN_DRAWS {
            Err(Error::InsufficientDraws {
                got: self.len(),
                need: MIN_CHAIN_DRAWS,
            })
        } else {
            Ok(())
        }
    }

    /// Chain average of `theta`.
    pub fn posterior_mean(&self) -> Vec<f64> {
        (0..self.n).map(|i| pairwise_sum(&self.coordinate(i)) / self.len() as f64).collect()
    }

    /// Equal-tailed intervals from the `alpha/2` and `1 - alpha/2` empirical
    /// quantiles of each coordinate.
    pub fn marginal_intervals(&self, alpha: f64) -> Result<Vec<CredibleInterval>> {
        self.require_draws()?;
        check_alpha(alpha)?;
        Ok((0..self.n)
            .map(|i| {
                let mut xs = self.coordinate(i);
                xs.sort_by(f64::total_cmp);
                CredibleInterval::from_endpoints(order_statistic(&xs, 0.5 * alpha), order_statistic(&xs, 1.0 - 0.5 * alpha), alpha)
            })
            .collect())
    }

    /// Intervals `theta_hat_i ± L r_i` around the chain mean, with `r_i` the
    /// empirical `(1 - alpha)`-quantile of `|theta_i - theta_hat_i|`.
    pub fn centered_intervals(&self, alpha: f64, blowup: f64) -> Result<Vec<CredibleInterval>> {
        self.require_draws()?;
        check_alpha(alpha)?;
        let mean = self.posterior_mean();
        Ok((0..self.n)
            .map(|i| {
                let mut d: Vec<f64> = self.coordinate(i).iter().map(|x| (x - mean[i]).abs()).collect();
                d.sort_by(f64::total_cmp);
                CredibleInterval::new(mean[i], order_statistic(&d, 1.0 - alpha), alpha, blowup)
            })
            .collect())
    }

    /// Ball around the chain mean with radius `L` times the empirical
    /// `(1 - alpha)`-quantile of `||theta^(s) - theta_hat||_2`. The reported
    /// standard error treats the draws as independent.
    pub fn ball(&self, alpha: f64, blowup: f64) -> Result<CredibleBall> {
        self.require_draws()?;
        check_alpha(alpha)?;
        let mean = self.posterior_mean();
        let mut norms: Vec<f64> = (0..self.len())
            .map(|s| {
                let sq: Vec<f64> = self.draw(s).iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).collect();
                pairwise_sum(&sq).sqrt()
            })
            .collect();
        norms.sort_by(f64::total_cmp);
        Ok(CredibleBall {
            center: mean,
            radius: blowup * order_statistic(&norms, 1.0 - alpha),
            alpha,
            blowup_l: blowup,
            mc_draws: self.len(),
            mc_se: quantile_standard_error(&norms, 1.0 - alpha),
            approx: false,
        })
    }

    /// CSV with columns `iter, tau, theta_<i>...` for the selected
    /// coordinates (all when `columns` is `None`, 1-based names).
    pub fn write_csv<W: Write>(&self, mut w: W, columns: Option<&[usize]>) -> Result<()> {
        let all: Vec<usize> = (0..self.n).collect();
        let cols = columns.unwrap_or(&all);
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.n) {
            return Err(Error::domain(format!("column {bad} out of range for n = {}", self.n)));
        }
        write!(w, "iter,tau")?;
        for c in cols {
            write!(w, ",theta_{}", c + 1)?;
        }
        writeln!(w)?;
        for s in 0..self.len() {
            let iter = self.burn_in + (s + 1) * self.thin;
            write!(w, "{iter},{}", self.tau[s])?;
            let row = self.draw(s);
            for &c in cols {
                write!(w, ",{}", row[c])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

pub fn hb_marginal_intervals(chain: &Chain, alpha: f64) -> Result<Vec<CredibleInterval>> {
    chain.marginal_intervals(alpha)
}

pub fn hb_centered_intervals(chain: &Chain, alpha: f64, blowup: f64) -> Result<Vec<CredibleInterval>> {
    chain.centered_intervals(alpha, blowup)
}

pub fn hb_ball(chain: &Chain, alpha: f64, blowup: f64) -> Result<CredibleBall> {
    chain.ball(alpha, blowup)
}

/// Standard error of the mean of an autocorrelated series by
/// non-overlapping batch means with `floor(sqrt(N))` batches.
pub fn batch_means_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    let batches = (n as f64).sqrt().floor() as usize;
    if batches < 2 {
        return f64::NAN;
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| pairwise_sum(&xs[b * size..(b + 1) * size]) / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// Standard error of the empirical `p`-quantile of a chain: batch-means
/// standard error of the indicator `1{x <= q}` at the sample quantile,
/// divided by the density at `q`.
pub fn quantile_mc_se(xs: &[f64], p: f64, density_at_quantile: f64) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = order_statistic(&sorted, p);
    let ind: Vec<f64> = xs.iter().map(|&x| if x <= q { 1.0 } else { 0.0 }).collect();
    batch_means_se(&ind) / density_at_quantile
}

/// Checks of a hyperprior against the support and mass conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperpriorReport {
    /// Support inside `[1/n, 1]`.
    pub cond2: bool,
    /// `t_n = C_u pi^{3/2} tau_n(p)`.
    pub t_n: f64,
    /// Prior mass of `[t_n / 2, t_n]`; the exponential-rate condition asks
    /// this to be at least `exp(-c p)` for some `c < C_u / 2`.
    pub cond3_mass: f64,
    /// `-log(cond3_mass) / p`, the smallest admissible `c`.
    pub cond3_rate: f64,
    /// Same mass, compared with `t_n` by the weaker condition.
    pub cond4_mass: f64,
    /// `cond4_mass / t_n`.
    pub cond4_ratio: f64,
}

pub fn verify_hyperprior(prior: &HyperPrior, rate: SparsityRate, c_u: f64) -> Result<HyperpriorReport> {
    if !(c_u > 0.0) {
        return Err(Error::domain(format!("C_u must be positive, got {c_u}")));
    }
    prior.validate()?;
    let n = rate.n() as f64;
    let (lo, hi) = prior.support();
    let cond2 = lo >= 1.0 / n * (1.0 - 1e-12) && hi <= 1.0;
    let t_n = c_u * PI.powf(1.5) * rate.tau();
    let mass = prior.mass(0.5 * t_n, t_n)?;
    Ok(HyperpriorReport {
        cond2,
        t_n,
        cond3_mass: mass,
        cond3_rate: -mass.ln() / rate.p() as f64,
        cond4_mass: mass,
        cond4_ratio: mass / t_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Vec<f64> {
        (0..20).map(|i| if i < 3 { 6.0 } else { ((i * 7) % 5) as f64 * 0.3 - 0.6 }).collect()
    }

    #[test]
    fn point_mass_keeps_tau() {
        let t = GlobalScale::new(0.1).unwrap();
        let chain = run_chain(&data(), HyperPrior::PointMass(t), ChainOptions { iters: 2000, burn_in: 100, thin: 1, seed: 1 }).unwrap();
        assert!(chain.tau_draws().iter().all(|&x| (x - 0.1).abs() < 1e-15));
        assert_eq!(chain.len(), 1900);
    }

    #[test]
    fn rao_blackwell_weights_match_exact() {
        let t = GlobalScale::new(0.1).unwrap();
        let ys = data();
        let chain = run_chain(&ys, HyperPrior::PointMass(t), ChainOptions { iters: 40_000, burn_in: 1000, thin: 1, seed: 4 }).unwrap();
        let exact = crate::selection::shrinkage_weights(&ys, t).unwrap();
        for (i, (&w, &e)) in chain.shrinkage_weights().iter().zip(&exact).enumerate() {
            assert!((w - e).abs() < 0.01, "coordinate {i}: {w} vs {e}");
        }
    }

    #[test]
    fn truncated_support_respected() {
        let ys = data();
        for prior in [HyperPrior::truncated_cauchy(ys.len()), HyperPrior::truncated_uniform(ys.len())] {
            let chain = run_chain(&ys, prior, ChainOptions { iters: 3000, burn_in: 0, thin: 3, seed: 2 }).unwrap();
            assert_eq!(chain.len(), 1000);
            assert!(chain.tau_draws().iter().all(|&t| (0.05..=1.0).contains(&t)));
        }
    }

    #[test]
    fn chain_is_seed_deterministic() {
        let ys = data();
        let o = ChainOptions { iters: 500, burn_in: 100, thin: 2, seed: 5 };
        assert_eq!(run_chain(&ys, HyperPrior::HalfCauchy, o).unwrap(), run_chain(&ys, HyperPrior::HalfCauchy, o).unwrap());
        assert!(run_chain(&ys, HyperPrior::HalfCauchy, ChainOptions { iters: 10, burn_in: 10, thin: 1, seed: 0 }).is_err());
    }

    #[test]
    fn frozen_scales_give_conditional_normal() {
        let ys = [2.0, -1.0];
        let mut rng = rng::stream(3, 0);
        let (l2, tau2) = (4.0, 0.25);
        let w = l2 * tau2 / (1.0 + l2 * tau2);
        let n = 100_000;
        let mut draws = Vec::with_capacity(n);
        for _ in 0..n {
            let mut st = GibbsState {
                theta: ys.to_vec(),
                lambda2: vec![l2; 2],
                nu: vec![1.0; 2],
                tau2,
                xi: 1.0,
            };
            gibbs_step(&mut st, &ys, &HyperPrior::PointMass(GlobalScale::new(0.5).unwrap()), &mut rng).unwrap();
            draws.push(st.theta[0]);
        }
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - w * 2.0).abs() < 4.0 * (w / n as f64).sqrt());
        assert!((var - w).abs() < 4.0 * w * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn summaries_of_constant_chain() {
        let t = GlobalScale::new(1e-12).unwrap();
        let ys = [0.0; 3];
        let chain = run_chain(&ys, HyperPrior::PointMass(t), ChainOptions { iters: 300, burn_in: 0, thin: 1, seed: 0 }).unwrap();
        // With tau = 1e-12 every draw is within ~1e-12 of zero.
        for iv in chain.marginal_intervals(0.05).unwrap() {
            assert!(iv.half_width < 1e-9);
        }
        let mut buf = Vec::new();
        chain.write_csv(&mut buf, Some(&[0, 2])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iter,tau,theta_1,theta_3\n1,"));
        assert_eq!(text.lines().count(), 301);
    }

    #[test]
    fn hyperprior_masses() {
        let prior = HyperPrior::truncated_cauchy(400);
        let m = prior.mass(0.2, 0.5).unwrap();
        let exact = (0.5f64.atan() - 0.2f64.atan()) / (1.0f64.atan() - (1.0f64 / 400.0).atan());
        assert!((m - exact).abs() < 1e-12);
        let rate = SparsityRate::new(400, 60).unwrap();
        let r = verify_hyperprior(&prior, rate, 1.0).unwrap();
        assert!(r.cond2);
        assert!(r.cond3_rate < 0.5);
        assert!(verify_hyperprior(&HyperPrior::truncated_uniform(400), rate, 1.0).unwrap().cond2);
        assert!(!verify_hyperprior(&HyperPrior::HalfCauchy, rate, 1.0).unwrap().cond2);
    }
}

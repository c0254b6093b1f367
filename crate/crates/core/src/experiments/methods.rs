use serde::Serialize;

use crate::credible::{self, CredibleBall, CredibleInterval};
use crate::error::Result;
use crate::hierarchical::{self, ChainOptions, HyperPrior};
use crate::kernels::Kernels;
use crate::numeric::special::norm_quantile;
use crate::par;
use crate::scale::GlobalScale;
use crate::selection::shrinkage_weights;
use crate::tau::{self, TauEstimate};

use super::config::{HbSettings, MethodSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodOptions {
    pub c1: f64,
    pub c2: f64,
    pub hb: HbSettings,
    pub ball_draws: Option<usize>,
    /// Seed for the chain and the ball draws.
    pub seed: u64,
}

impl Default for MethodOptions {
    fn default() -> Self {
        MethodOptions {
            c1: 2.0,
            c2: 1.0,
            hb: HbSettings::default(),
            ball_draws: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOutput {
    pub method: MethodSpec,
    /// Plug-in `tau`, or the posterior mean of `tau` for the hierarchical methods.
    pub tau: f64,
    pub means: Vec<f64>,
    pub intervals: Vec<CredibleInterval>,
    /// Posterior mean over observation, used by the thresholding rule.
    pub kappa: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<CredibleBall>,
}

/// Normal quantile for two-sided level `alpha`, with the conventional 1.96
/// at `alpha = 0.05`.
pub fn normal_multiplier(alpha: f64) -> f64 {
    if alpha == 0.05 {
        1.96
    } else {
        norm_quantile(1.0 - 0.5 * alpha)
    }
}

fn plug_in(ys: &[f64], tau: &TauEstimate, alpha: f64, blowup: f64, opts: &MethodOptions, method: MethodSpec) -> Result<MethodOutput> {
    let t = tau.value;
    let intervals = credible::interval_batch(ys, t, alpha, blowup)?;
    let ball = match opts.ball_draws {
        Some(d) => Some(credible::credible_ball(ys, t, alpha, blowup, d, opts.seed)?),
        None => None,
    };
    Ok(MethodOutput {
        method,
        tau: t.get(),
        means: intervals.iter().map(|iv| iv.center).collect(),
        intervals,
        kappa: shrinkage_weights(ys, t)?,
        ball,
    })
}

/// `mean_i ± L z sqrt(var_i)` at the MMLE.
fn normal_approx(ys: &[f64], t: GlobalScale, alpha: f64, blowup: f64, opts: &MethodOptions) -> Result<MethodOutput> {
    let z = normal_multiplier(alpha);
    let moments = par::try_map_slice(ys, |i, &y| {
        let k = Kernels::new(y, t).map_err(|e| e.at(i))?;
        Ok((k.posterior_mean(), k.posterior_variance(), k.shrinkage_weight()))
    })?;
    let intervals = moments
        .iter()
        .map(|&(m, v, _)| CredibleInterval::new(m, z * v.sqrt(), alpha, blowup))
        .collect();
    let ball = match opts.ball_draws {
        Some(_) => Some(credible::credible_ball_approx(ys, t, alpha, blowup)?),
        None => None,
    };
    Ok(MethodOutput {
        method: MethodSpec::NormalApprox,
        tau: t.get(),
        means: moments.iter().map(|m| m.0).collect(),
        intervals,
        kappa: moments.iter().map(|m| m.2).collect(),
        ball,
    })
}

fn full_bayes(ys: &[f64], prior: HyperPrior, alpha: f64, blowup: f64, opts: &MethodOptions, method: MethodSpec) -> Result<MethodOutput> {
    let chain = hierarchical::run_chain(
        ys,
        prior,
        ChainOptions {
            iters: opts.hb.iters,
            burn_in: opts.hb.burn_in,
            thin: opts.hb.thin,
            seed: opts.seed,
        },
    )?;
    // Equal-tailed quantile intervals unless a blow-up is asked for.
    let intervals = if blowup == 1.0 {
        hierarchical::hb_marginal_intervals(&chain, alpha)?
    } else {
        hierarchical::hb_centered_intervals(&chain, alpha, blowup)?
    };
    let means = chain.posterior_mean();
    let kappa = chain.shrinkage_weights().to_vec();
    let ball = match opts.ball_draws {
        Some(_) => Some(hierarchical::hb_ball(&chain, alpha, blowup)?),
        None => None,
    };
    let taus = chain.tau_draws();
    Ok(MethodOutput {
        method,
        tau: taus.iter().sum::<f64>() / taus.len() as f64,
        means,
        intervals,
        kappa,
        ball,
    })
}

/// Runs one method on one data set.
pub fn run_method(ys: &[f64], method: MethodSpec, alpha: f64, blowup: f64, opts: &MethodOptions) -> Result<MethodOutput> {
    let n = ys.len();
    match method {
        MethodSpec::EbMmle => plug_in(ys, &tau::mmle(ys)?, alpha, blowup, opts, method),
        MethodSpec::EbSimple => plug_in(ys, &tau::simple_estimator(ys, opts.c1, opts.c2)?, alpha, blowup, opts, method),
        MethodSpec::Fixed(t) => plug_in(ys, &TauEstimate::fixed(t), alpha, blowup, opts, method),
        MethodSpec::NormalApprox => normal_approx(ys, tau::mmle(ys)?.value, alpha, blowup, opts),
        MethodSpec::HbCauchy => full_bayes(ys, HyperPrior::HalfCauchy, alpha, blowup, opts, method),
        MethodSpec::HbTruncCauchy => full_bayes(ys, HyperPrior::truncated_cauchy(n), alpha, blowup, opts, method),
        MethodSpec::HbTruncUniform => full_bayes(ys, HyperPrior::truncated_uniform(n), alpha, blowup, opts, method),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_matches_credible_sets() {
        let ys = [0.0, 1.2, -3.5, 6.0];
        let t = GlobalScale::new(0.1).unwrap();
        let out = run_method(&ys, MethodSpec::Fixed(t), 0.05, 1.0, &MethodOptions::default()).unwrap();
        assert_eq!(out.intervals, credible::interval_batch(&ys, t, 0.05, 1.0).unwrap());
        assert_eq!(out.tau, 0.1);
    }

    #[test]
    fn normal_approx_at_zero() {
        // The MMLE of all-zero data is 1/n.
        let ys = [0.0; 10];
        let out = run_method(&ys, MethodSpec::NormalApprox, 0.05, 1.0, &MethodOptions::default()).unwrap();
        let v = crate::kernels::posterior_variance(0.0, GlobalScale::new(0.1).unwrap()).unwrap();
        assert_eq!(out.tau, 0.1);
        assert_eq!(out.intervals[0].half_width, 1.96 * v.sqrt());
        assert_eq!(out.intervals[0].center, 0.0);
    }
}

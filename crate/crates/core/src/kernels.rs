//! Shrinkage integrals of the horseshoe posterior and the quantities built
//! from them.
//!
//! For a half-integer order `k` and observation `y`,
//!
//! ```text
//! I_k(y) = ∫_0^1 z^k (tau^2 + (1 - tau^2) z)^-1 exp(y^2 z / 2) dz
//! ```
//!
//! The marginal density of an observation, the posterior moments of a mean
//! and the likelihood score in `tau` are all ratios of these integrals. The
//! integrand spans hundreds of orders of magnitude once `|y|` is large, so
//! every value is carried as `log I_k` with the factor `exp(y^2/2)` pulled out.
//!
//! Two evaluation routes are implemented:
//!
//! * a Poisson-weighted series `I_k = e^a Σ_m Pois(m; a) J_{k+m}` with
//!   `a = y^2/2` and `J_s = ∫ z^s / (tau^2 + c^2 z) dz`, where the `J_s`
//!   follow the forward recursion `c^2 J_s + tau^2 J_{s-1} = 1/s`. The
//!   recursion is stable while `tau^2 < c^2`, so the series is used for
//!   `tau <= 0.7`;
//! * globally adaptive Gauss-Kronrod quadrature after the substitution
//!   `z = u^2`, which removes the `z^{-1/2}` endpoint singularity.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::quad::{self, Tolerance};
use crate::numeric::special::LN_SQRT_2PI;
use crate::numeric::{roots, sorted_sum};
use crate::par;
use crate::scale::{GlobalScale, KernelOrder};

/// Measured supremum of the score `m_tau(y)`. A scan over `y ∈ [0, 40]`
/// (step 0.005) and 60 log-spaced `tau ∈ [1e-8, 1]` peaked at
/// `1 + 2.2e-13`, approached as `|y|` grows; the excess is round-off.
pub const SCORE_UPPER_BOUND: f64 = 1.0;

const SERIES_MAX_TAU: f64 = 0.7;
const SERIES_MAX_A: f64 = 5000.0;
const QUAD_TOL: Tolerance = Tolerance::new(0.0, 1e-13);

/// How the shrinkage integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Series where it is stable, quadrature elsewhere.
    Auto,
    Series,
    Quadrature,
}

/// `log I_k(y)` for every [`KernelOrder`], plus `log(I_{1/2} - I_{3/2})`,
/// stored with the factor `exp(y^2/2)` taken out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    y: f64,
    tau: f64,
    log_red: [f64; 5],
    log_diff: f64,
}

impl Kernels {
    pub fn new(y: f64, tau: GlobalScale) -> Result<Self> {
        Self::with_method(y, tau, Method::Auto)
    }

    pub fn with_method(y: f64, tau: GlobalScale, method: Method) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::domain(format!("observation must be finite, got {y}")));
        }
        let t = tau.get();
        let a = 0.5 * y * y;
        let series_ok = t <= SERIES_MAX_TAU && a <= SERIES_MAX_A;
        let (log_red, log_diff) = match method {
            Method::Auto if series_ok => series(a, t),
            Method::Series => {
                if t > SERIES_MAX_TAU {
                    return Err(Error::domain(format!("series route requires tau <= {SERIES_MAX_TAU}")));
                }
                series(a, t)
            }
            _ => quadrature(a, t)?,
        };
        Ok(Kernels {
            y,
            tau: t,
            log_red,
            log_diff,
        })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn log_i(&self, k: KernelOrder) -> f64 {
        0.5 * self.y * self.y + self.log_red[k.index()]
    }

    /// `log I_k(y) - y^2/2`.
    #[inline]
    pub fn log_i_reduced(&self, k: KernelOrder) -> f64 {
        self.log_red[k.index()]
    }

    /// `I_k / I_{-1/2}`, i.e. `E[z^{k+1/2}]` under the shrinkage-weight law.
    #[inline]
    pub fn ratio(&self, k: KernelOrder) -> f64 {
        (self.log_red[k.index()] - self.log_red[0]).exp()
    }

    /// Posterior shrinkage weight `E[z | y] = I_{1/2}/I_{-1/2}`, the ratio of
    /// posterior mean to observation.
    #[inline]
    pub fn shrinkage_weight(&self) -> f64 {
        self.ratio(KernelOrder::Half)
    }

    pub fn log_marginal_density(&self) -> f64 {
        self.tau.ln() - PI.ln() + self.log_red[0] - LN_SQRT_2PI
    }

    pub fn score(&self) -> f64 {
        let y2 = self.y * self.y;
        y2 * (self.log_diff - self.log_red[0]).exp() - self.shrinkage_weight()
    }

    pub fn posterior_mean(&self) -> f64 {
        self.y * self.shrinkage_weight()
    }

    pub fn posterior_variance(&self) -> f64 {
        let r1 = self.shrinkage_weight();
        let r3 = self.ratio(KernelOrder::ThreeHalves);
        let y2 = self.y * self.y;
        // r3 - r1^2 is Var(z) >= 0; clamp round-off.
        (y2 * (r3 - r1 * r1).max(0.0) + r1).max(f64::MIN_POSITIVE)
    }

    /// Fourth central posterior moment, from the raw moments
    /// `E[theta^j | y] = h^(j)(y) / h(y)` with `h = I_{-1/2}`.
    pub fn posterior_fourth_central(&self) -> f64 {
        let y = self.y;
        let r = |k| self.ratio(k);
        use KernelOrder::*;
        let m1 = y * r(Half);
        let m2 = y * y * r(ThreeHalves) + r(Half);
        let m3 = y.powi(3) * r(FiveHalves) + 3.0 * y * r(ThreeHalves);
        let m4 = y.powi(4) * r(SevenHalves) + 6.0 * y * y * r(FiveHalves) + 3.0 * r(ThreeHalves);
        let mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
        let var = self.posterior_variance();
        mu4.max(var * var)
    }
}

/// Poisson(`a`) probabilities `m = start .. start + len`, covering all terms
/// above `1e-20` of the mode. Built outward from the mode to avoid underflow.
fn poisson_window(a: f64) -> (usize, Vec<f64>) {
    if a == 0.0 {
        return (0, vec![1.0]);
    }
    let mode = a.floor() as usize;
    let peak = (-a + mode as f64 * a.ln() - ln_gamma(mode as f64 + 1.0)).exp();
    let cutoff = peak * 1e-20;
    let mut up = vec![peak];
    let mut w = peak;
    let mut m = mode;
    loop {
        m += 1;
        w *= a / m as f64;
        if w < cutoff {
            break;
        }
        up.push(w);
    }
    let mut down = Vec::new();
    let mut w = peak;
    let mut m = mode;
    while m > 0 {
        w *= m as f64 / a;
        m -= 1;
        if w < cutoff {
            break;
        }
        down.push(w);
    }
    let start = mode - down.len();
    down.reverse();
    down.extend(up);
    (start, down)
}

/// `J_{j - 1/2} = ∫_0^1 z^{j-1/2} / (tau^2 + c^2 z) dz` for `j < len`.
fn j_table(tau: f64, len: usize) -> Vec<f64> {
    let t2 = tau * tau;
    let c2 = 1.0 - t2;
    let c = c2.sqrt();
    let mut j = Vec::with_capacity(len);
    j.push(2.0 / (tau * c) * (c / tau).atan());
    for idx in 1..len {
        let s = idx as f64 - 0.5;
        let prev = j[idx - 1];
        j.push((1.0 / s - t2 * prev) / c2);
    }
    j
}

fn series(a: f64, tau: f64) -> ([f64; 5], f64) {
    let (start, w) = poisson_window(a);
    let j = j_table(tau, start + w.len() + 5);
    let mut sums = [0.0; 5];
    let mut diff = 0.0;
    for (off, &wm) in w.iter().enumerate() {
        let m = start + off;
        for (k, s) in sums.iter_mut().enumerate() {
            *s += wm * j[m + k];
        }
        diff += wm * (j[m + 1] - j[m + 2]);
    }
    (sums.map(f64::ln), diff.ln())
}

/// Log marginal likelihood and score sum of a fixed sample at many values of
/// `tau`. The Poisson weights of the series depend only on the observations
/// and the `J_s` only on `tau`, so each is computed once.
#[derive(Debug, Clone)]
pub struct LikelihoodBatch {
    ys: Vec<f64>,
    windows: Vec<(usize, Vec<f64>)>,
    table_len: usize,
}

impl LikelihoodBatch {
    pub fn new(ys: &[f64]) -> Result<Self> {
        if ys.is_empty() {
            return Err(Error::domain("likelihood needs at least one observation"));
        }
        if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
            return Err(Error::domain(format!("observation must be finite, got {}", ys[i])).at(i));
        }
        let windows: Vec<(usize, Vec<f64>)> = ys
            .iter()
            .map(|&y| {
                let a = 0.5 * y * y;
                if a <= SERIES_MAX_A {
                    poisson_window(a)
                } else {
                    (0, Vec::new())
                }
            })
            .collect();
        let table_len = windows.iter().map(|(s, w)| s + w.len() + 3).max().unwrap_or(3);
        Ok(LikelihoodBatch {
            ys: ys.to_vec(),
            windows,
            table_len,
        })
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// `(sum_i log psi_tau(y_i), sum_i m_tau(y_i))`, each summed in sorted
    /// order.
    pub fn evaluate(&self, tau: GlobalScale) -> Result<(f64, f64)> {
        let t = tau.get();
        let mut logs = Vec::with_capacity(self.ys.len());
        let mut scores = Vec::with_capacity(self.ys.len());
        if t <= SERIES_MAX_TAU {
            let j = j_table(t, self.table_len);
            let base = t.ln() - PI.ln() - LN_SQRT_2PI;
            for (i, (&y, (start, w))) in self.ys.iter().zip(&self.windows).enumerate() {
                if w.is_empty() {
                    let k = Kernels::new(y, tau).map_err(|e| e.at(i))?;
                    logs.push(k.log_marginal_density());
                    scores.push(k.score());
                    continue;
                }
                let (mut s0, mut s1, mut d) = (0.0, 0.0, 0.0);
                for (off, &wm) in w.iter().enumerate() {
                    let m = start + off;
                    s0 += wm * j[m];
                    s1 += wm * j[m + 1];
                    d += wm * (j[m + 1] - j[m + 2]);
                }
                // exp(y^2/2) of the integral cancels against phi(y).
                logs.push(base + s0.ln());
                scores.push((y * y * d - s1) / s0);
            }
        } else {
            for (i, &y) in self.ys.iter().enumerate() {
                let k = Kernels::new(y, tau).map_err(|e| e.at(i))?;
                logs.push(k.log_marginal_density());
                scores.push(k.score());
            }
        }
        Ok((sorted_sum(logs), sorted_sum(scores)))
    }
}

/// Breakpoints in `u = sqrt(z)` that isolate the two features of the
/// shrinkage integrand: the Lorentzian bump of width `tau` at the origin and
/// the exponential ramp of width `1/a` at `u = 1`.
pub(crate) fn shrinkage_breaks(a: f64, tau: f64) -> Vec<f64> {
    let mut b = vec![0.0, 1.0];
    if tau < 1.0 {
        let mut x = tau / 64.0;
        while x < 0.95 {
            b.push(x);
            x *= 4.0;
        }
    }
    if a > 2.0 {
        for j in [256.0, 64.0, 16.0, 4.0, 1.0, 0.25] {
            let z = 1.0 - j / a;
            if z > 0.0 {
                b.push(z.sqrt());
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    b
}

/// Above this `y^2/2` the quadrature runs in `v = a (1 - z)`.
pub(crate) const RAMP_A: f64 = 500.0;
/// `v` beyond which the integrand is below `exp(-800) / tau^2`.
const RAMP_V: f64 = 800.0;

fn quadrature(a: f64, tau: f64) -> Result<([f64; 5], f64)> {
    if a > RAMP_A {
        return ramp_quadrature(a, tau);
    }
    let t2 = tau * tau;
    let c2 = 1.0 - t2;
    let breaks = shrinkage_breaks(a, tau);
    let est = quad::integrate(
        |u| {
            let u2 = u * u;
            let base = 2.0 * (a * (u2 - 1.0)).exp() / (t2 + c2 * u2);
            let u4 = u2 * u2;
            [
                base,
                base * u2,
                base * u4,
                base * u4 * u2,
                base * u4 * u4,
                base * u2 * (1.0 - u2),
            ]
        },
        &breaks,
        QUAD_TOL,
        "shrinkage integral",
    )?;
    let v = est.value;
    Ok(([v[0], v[1], v[2], v[3], v[4]].map(f64::ln), v[5].ln()))
}

/// Large `a`: all the mass sits within `O(1/a)` of `z = 1`, where
/// `I_k = e^a / a * ∫_0^a z^k e^{-v} / (tau^2 + (1 - tau^2) z) dv` with
/// `z = 1 - v/a`. The range is cut at `v = RAMP_V`.
/// Breakpoints in `v = a (1 - z)` over `[0, min(a, RAMP_V)]`.
pub(crate) fn ramp_breaks(a: f64) -> Vec<f64> {
    let top = a.min(RAMP_V);
    let mut breaks = vec![0.0, top];
    breaks.extend([0.25, 1.0, 4.0, 16.0, 64.0, 256.0].into_iter().filter(|&v| v < top));
    breaks.sort_by(f64::total_cmp);
    breaks
}

fn ramp_quadrature(a: f64, tau: f64) -> Result<([f64; 5], f64)> {
    let t2 = tau * tau;
    let c2 = 1.0 - t2;
    let breaks = ramp_breaks(a);
    let est = quad::integrate(
        |v| {
            let z = (a - v) / a;
            let base = (-v).exp() / (t2 + c2 * z) / z.sqrt();
            [base, base * z, base * z * z, base * z * z * z, base * z * z * z * z, base * z * (v / a)]
        },
        &breaks,
        QUAD_TOL,
        "shrinkage integral",
    )?;
    let v = est.value;
    let shift = -a.ln();
    Ok(([v[0], v[1], v[2], v[3], v[4]].map(|x| shift + x.ln()), shift + v[5].ln()))
}

/// `I_k(y)`. Overflows to infinity once `y^2/2` exceeds the double range
/// (about `|y| > 37.6`); use [`log_integral_ik`] there.
pub fn integral_ik(y: f64, tau: GlobalScale, k: KernelOrder) -> Result<f64> {
    log_integral_ik(y, tau, k).map(f64::exp)
}

pub fn log_integral_ik(y: f64, tau: GlobalScale, k: KernelOrder) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.log_i(k))
}

/// Marginal (prior predictive) density of one observation.
pub fn marginal_density(y: f64, tau: GlobalScale) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.log_marginal_density().exp())
}

pub fn log_marginal_density(y: f64, tau: GlobalScale) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.log_marginal_density())
}

/// Log marginal likelihood `sum_i log psi_tau(y_i)`, summed in sorted order
/// so that it is invariant under permutations of the sample.
pub fn log_marginal_lik(ys: &[f64], tau: GlobalScale) -> Result<f64> {
    if ys.is_empty() {
        return Err(Error::domain("log marginal likelihood needs at least one observation"));
    }
    let terms = par::try_map_slice(ys, |i, &y| log_marginal_density(y, tau).map_err(|e| e.at(i)))?;
    Ok(sorted_sum(terms))
}

/// The likelihood score kernel `m_tau(y)`; `d/dtau log psi_tau(y) = m_tau(y)/tau`.
pub fn score_m(y: f64, tau: GlobalScale) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.score())
}

pub fn posterior_mean(y: f64, tau: GlobalScale) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.posterior_mean())
}

pub fn posterior_variance(y: f64, tau: GlobalScale) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.posterior_variance())
}

pub fn posterior_fourth_central(y: f64, tau: GlobalScale) -> Result<f64> {
    Ok(Kernels::new(y, tau)?.posterior_fourth_central())
}

/// Solution `kappa >= sqrt(2)` of `exp(kappa^2/2) / (kappa^2/2) = 1/tau`.
///
/// The left side is increasing on that branch with minimum `e`, so a
/// solution exists only for `tau <= 1/e`.
pub fn kappa_threshold(tau: GlobalScale) -> Result<f64> {
    let target = -tau.get().ln();
    if target < 1.0 {
        return Err(Error::domain(format!(
            "kappa threshold needs tau <= 1/e, got {}",
            tau.get()
        )));
    }
    // v - ln v = target with v = kappa^2 / 2 >= 1.
    let g = |v: f64| v - v.ln() - target;
    let hi = target + target.ln() + 2.0;
    let mut v = roots::bisect(|v| Ok(g(v) >= 0.0), 1.0, hi, 1e-14 * hi)?;
    for _ in 0..3 {
        let d = 1.0 - 1.0 / v;
        if d <= 0.0 {
            break;
        }
        let step = g(v) / d;
        if !step.is_finite() {
            break;
        }
        v = (v - step).max(1.0);
    }
    Ok((2.0 * v).sqrt())
}

/// `H_k(y) = (y^2/2)^{-k} ∫_c^{y^2/2} v^{k-1} e^v dv` with `c = 0` for
/// `k > 0` and `c = 1` otherwise (negative when `y^2/2 < 1` and `k < 0`).
pub fn expansion_hk(y: f64, k: KernelOrder) -> Result<f64> {
    let kv = k.value();
    let a = 0.5 * y * y;
    if kv < 0.0 && a == 0.0 {
        return Err(Error::domain("H_k with k < 0 needs y != 0"));
    }
    // Substituting v = a s gives H_k = ∫_{s0}^1 s^{k-1} e^{a s} ds.
    if kv > 0.0 {
        // s = u^2 removes the s^{k-1} singularity at zero.
        let breaks = expansion_breaks(a, 0.0);
        let (v, _) = quad::integrate_scalar(
            |u| 2.0 * u.powf(2.0 * kv - 1.0) * (a * (u * u - 1.0)).exp(),
            &breaks,
            QUAD_TOL,
            "incomplete gamma expansion",
        )?;
        Ok(a.exp() * v)
    } else {
        let s0 = 1.0 / a;
        let (lo, hi, sign) = if s0 <= 1.0 { (s0, 1.0, 1.0) } else { (1.0, s0, -1.0) };
        let shift = a * hi;
        let mut breaks = expansion_breaks(a, lo);
        breaks.retain(|&b| b >= lo && b <= hi);
        if hi > 1.0 {
            breaks = vec![lo, hi];
        }
        let (v, _) = quad::integrate_scalar(
            |s| s.powf(kv - 1.0) * (a * s - shift).exp(),
            &breaks,
            QUAD_TOL,
            "incomplete gamma expansion",
        )?;
        Ok(sign * shift.exp() * v)
    }
}

fn expansion_breaks(a: f64, lo: f64) -> Vec<f64> {
    let mut b = vec![lo, 1.0];
    if a > 2.0 {
        for j in [64.0, 16.0, 4.0, 1.0] {
            let s = 1.0 - j / a;
            if s > lo {
                b.push(if lo == 0.0 { s.sqrt() } else { s });
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `log phi(0)`, exposed for closed-form checks.
pub const LOG_PHI_ZERO: f64 = -LN_SQRT_2PI;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tau(t: f64) -> GlobalScale {
        GlobalScale::new(t).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn closed_forms_at_zero() {
        // Denominator is 1 at tau = 1.
        let v = integral_ik(0.0, tau(1.0), KernelOrder::MinusHalf).unwrap();
        assert!(rel(v, 2.0) < 1e-13);
        let v = integral_ik(0.0, tau(std::f64::consts::FRAC_1_SQRT_2), KernelOrder::MinusHalf).unwrap();
        assert!(rel(v, PI) < 1e-13);
        let d = marginal_density(0.0, tau(1.0)).unwrap();
        assert!(rel(d, 2.0 / (PI * (2.0 * PI).sqrt())) < 1e-13);
        let v = posterior_variance(0.0, tau(1.0)).unwrap();
        assert!(rel(v, 1.0 / 3.0) < 1e-13);
    }

    #[test]
    fn series_matches_quadrature() {
        for &t in &[1e-6, 1e-4, 0.003, 0.05, 0.3, 0.5, 0.7] {
            for &y in &[0.0, 0.3, 1.0, 2.5, 4.0, 7.0, 12.0, 30.0, 60.0] {
                let s = Kernels::with_method(y, tau(t), Method::Series).unwrap();
                let q = Kernels::with_method(y, tau(t), Method::Quadrature).unwrap();
                for k in KernelOrder::ALL {
                    let (ls, lq) = (s.log_i(k), q.log_i(k));
                    assert!((ls - lq).abs() < 1e-11 * ls.abs().max(1.0), "y={y} tau={t} k={k:?}: {ls} vs {lq}");
                }
                assert!((s.log_diff - q.log_diff).abs() < 1e-10 * s.log_diff.abs().max(1.0), "diff y={y} tau={t}");
            }
        }
    }

    #[test]
    fn series_route_rejects_large_tau() {
        assert!(Kernels::with_method(1.0, tau(0.9), Method::Series).is_err());
        assert!(Kernels::new(f64::NAN, tau(0.1)).is_err());
    }

    #[test]
    fn large_observation_stays_finite() {
        let k = Kernels::new(200.0, tau(0.01)).unwrap();
        assert!(k.log_i(KernelOrder::MinusHalf).is_finite());
        assert!((k.posterior_mean() - 200.0).abs() < 0.05);
        assert!((k.posterior_variance() - 1.0).abs() < 0.01);
        assert!(log_marginal_density(200.0, tau(0.01)).unwrap().is_finite());
        // Quadrature route beyond the series range.
        let k = Kernels::new(120.0, tau(1e-3)).unwrap();
        assert!((k.score() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn density_tail_is_cauchy_like() {
        // psi(y) y^2 -> 2 tau / (pi sqrt(2 pi)) with relative error O(1/y^2).
        for t in [1e-4, 0.05, 1.0] {
            let limit = 2.0 * t / (PI * (2.0 * PI).sqrt());
            for y in [1e3, 1e5, 1e9] {
                let d = marginal_density(y, tau(t)).unwrap() * y * y / limit;
                assert!((d - 1.0).abs() < 4.0 / (y * y) + 1e-13, "tau={t} y={y} {d}");
            }
        }
    }

    #[test]
    fn log_marginal_lik_requires_data() {
        assert!(log_marginal_lik(&[], tau(0.5)).is_err());
        let single = log_marginal_lik(&[0.0], tau(1.0)).unwrap();
        assert!((single - (2.0 / (PI * (2.0 * PI).sqrt())).ln()).abs() < 1e-13);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn score_small_tau_limits() {
        let t = tau(1e-4);
        let m0 = score_m(0.0, t).unwrap();
        let ratio = m0 / (-2.0 * 1e-4 / PI);
        assert!((0.95..=1.05).contains(&ratio), "{ratio}");
        // Values at y = zeta_tau from an independent 30-digit quadrature;
        // the normalized score tends to 1 only at rate 1/log(1/tau).
        for (t, oracle) in [(1e-4, 1.192_929_704_937_867_2), (1e-8, 1.075_001_065_697_939_9)] {
            let t = tau(t);
            let z = t.zeta();
            let mz = score_m(z, t).unwrap() * PI * z * z / 2.0;
            assert!(rel(mz, oracle) < 1e-10, "{mz}");
        }
        let t = tau(1e-3);
        let m6 = score_m(6.0, t).unwrap();
        assert!((m6 - 1.0).abs() <= t.zeta().powi(-2), "{m6}");
    }

    #[test]
    fn score_bounds_scan() {
        let mut max = f64::MIN;
        for &t in &[1e-8, 1e-5, 1e-3, 0.05, 0.4, 1.0] {
            let mut prev = f64::MIN;
            for i in 0..=400 {
                let y = i as f64 * 0.05;
                let m = score_m(y, tau(t)).unwrap();
                assert!(m >= -1.0 - 1e-12);
                assert!(m >= prev - 1e-12, "not monotone at y={y}, tau={t}");
                prev = m;
                max = max.max(m);
            }
        }
        assert!(max <= SCORE_UPPER_BOUND + 1e-12, "{max}");
    }

    #[test]
    fn posterior_mean_near_observation_for_large_y() {
        let t = tau(0.1);
        let m = posterior_mean(10.0, t).unwrap();
        assert!((m - 10.0).abs() <= 2.0 / t.zeta());
        let t = tau(1e-3);
        let v = posterior_variance(8.0, t).unwrap();
        assert!((v - 1.0).abs() <= t.zeta().powi(-2));
    }

    #[test]
    fn kappa_solves_defining_equation() {
        for &t in &[1e-8, 1e-3, 0.01, 0.2, (-1f64).exp()] {
            let k = kappa_threshold(tau(t)).unwrap();
            assert!(k >= 2f64.sqrt() - 1e-12);
            let v = k * k / 2.0;
            let lhs = v.exp() / v;
            assert!((lhs - 1.0 / t).abs() <= 1e-9 / t, "tau={t}: {lhs}");
        }
        assert!(kappa_threshold(tau(0.5)).is_err());
        assert!(kappa_threshold(tau(0.001)).unwrap() > kappa_threshold(tau(0.01)).unwrap());
    }

    #[test]
    fn kappa_matches_bisection_oracle() {
        let f = |k: f64| (k * k / 2.0).exp() / (k * k / 2.0) - 100.0;
        let (mut lo, mut hi) = (2f64.sqrt(), 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        assert!((kappa_threshold(tau(0.01)).unwrap() - lo).abs() < 1e-12);
    }

    #[test]
    fn expansion_hk_values() {
        // Series oracle: ∫_0^1 v^{-1/2} e^v dv = Σ 1 / (m! (m + 1/2)).
        let mut oracle = 0.0;
        let mut fact = 1.0;
        for m in 0..40 {
            if m > 0 {
                fact *= m as f64;
            }
            oracle += 1.0 / (fact * (m as f64 + 0.5));
        }
        let h = expansion_hk(2f64.sqrt(), KernelOrder::Half).unwrap();
        assert!(rel(h, oracle) < 1e-12, "{h} vs {oracle}");

        let h = expansion_hk(10.0, KernelOrder::Half).unwrap();
        assert!(rel(h, 50f64.exp() / 50.0) < 0.05);

        for i in 0..40 {
            let y = 2f64.sqrt() + i as f64 * 0.25;
            let h1 = expansion_hk(y, KernelOrder::Half).unwrap();
            let h3 = expansion_hk(y, KernelOrder::ThreeHalves).unwrap();
            assert!(h3 <= h1, "y={y}");
        }
        assert!(expansion_hk(0.0, KernelOrder::MinusHalf).is_err());
        // k = -1/2 integrates from 1: sign flips below y^2/2 = 1.
        assert!(expansion_hk(1.0, KernelOrder::MinusHalf).unwrap() < 0.0);
        let h = expansion_hk(12.0, KernelOrder::MinusHalf).unwrap();
        assert!(rel(h, 72f64.exp() / 72.0) < 0.05);
    }

    #[test]
    fn batch_matches_pointwise() {
        let ys = [0.0, 0.4, -1.3, 2.2, 5.0, -9.0, 80.0];
        let batch = LikelihoodBatch::new(&ys).unwrap();
        for &t in &[0.002, 0.1, 0.7, 0.9] {
            let (l, sc) = batch.evaluate(tau(t)).unwrap();
            let l0 = log_marginal_lik(&ys, tau(t)).unwrap();
            let s0: f64 = ys.iter().map(|&y| score_m(y, tau(t)).unwrap()).sum();
            assert!((l - l0).abs() < 1e-11 * l0.abs(), "{t}");
            assert!((sc - s0).abs() < 1e-11 * s0.abs().max(1.0), "{t}");
        }
    }

    proptest! {
        #[test]
        fn symmetry_and_bounds(y in -25.0f64..25.0, lt in -9.0f64..0.0) {
            let t = tau(10f64.powf(lt));
            let a = Kernels::new(y, t).unwrap();
            let b = Kernels::new(-y, t).unwrap();
            prop_assert_eq!(a.log_marginal_density(), b.log_marginal_density());
            prop_assert_eq!(a.posterior_mean(), -b.posterior_mean());
            prop_assert!(a.posterior_mean().abs() <= y.abs() * (1.0 + 1e-14));
            let v = a.posterior_variance();
            prop_assert!(v > 0.0 && v <= 1.0 + y * y);
            prop_assert!(a.posterior_fourth_central() >= v * v * (1.0 - 1e-12));
            let m = a.score();
            prop_assert!((-1.0 - 1e-12..=SCORE_UPPER_BOUND + 1e-12).contains(&m));
        }
    }
}

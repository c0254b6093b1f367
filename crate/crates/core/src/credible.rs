//! Credible sets for the whole mean vector: batches of marginal intervals,
//! `l2` credible balls, the small / medium / large signal regions and the
//! self-similarity and excessive-bias diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::special::norm_quantile;
use crate::numeric::{order_statistic, pairwise_sum, quantile_standard_error, sorted_sum};
use crate::par;
use crate::posterior::CoordinatePosterior;
use crate::rng;
use crate::scale::{tau_rate, zeta, GlobalScale};

/// Fewest Monte Carlo draws accepted for a ball radius.
pub const MIN_BALL_DRAWS: usize = 1000;
/// Coordinates per parallel work unit in the ball radius.
const BALL_CHUNK: usize = 128;

/// `{theta : |theta - center| <= half_width}` with
/// `half_width = blowup_l * base radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CredibleInterval {
    pub center: f64,
    pub half_width: f64,
    pub alpha: f64,
    pub blowup_l: f64,
}

impl CredibleInterval {
    pub fn new(center: f64, radius: f64, alpha: f64, blowup_l: f64) -> Self {
        CredibleInterval {
            center,
            half_width: blowup_l * radius,
            alpha,
            blowup_l,
        }
    }

    /// Interval with explicit endpoints, as produced from chain quantiles.
    pub fn from_endpoints(lower: f64, upper: f64, alpha: f64) -> Self {
        CredibleInterval {
            center: 0.5 * (lower + upper),
            half_width: 0.5 * (upper - lower),
            alpha,
            blowup_l: 1.0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.half_width
    }

    /// Radius before the blow-up factor.
    pub fn base_radius(&self) -> f64 {
        self.half_width / self.blowup_l
    }

    pub fn with_blowup(&self, blowup_l: f64) -> Self {
        CredibleInterval::new(self.center, self.base_radius(), self.alpha, blowup_l)
    }
}

/// `{theta : ||theta - center||_2 <= radius}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CredibleBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub alpha: f64,
    pub blowup_l: f64,
    /// Zero for the moment approximation.
    pub mc_draws: usize,
    /// Standard error of the radius (before blow-up); zero when not sampled.
    pub mc_se: f64,
    pub approx: bool,
}

impl CredibleBall {
    pub fn contains(&self, theta: &[f64]) -> Result<bool> {
        Ok(l2_distance(theta, &self.center)? <= self.radius)
    }

    pub fn base_radius(&self) -> f64 {
        self.radius / self.blowup_l
    }
}

pub fn l2_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    Ok(pairwise_sum(&sq).sqrt())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_blowup(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("blow-up factor must be positive, got {l}")))
    }
}

fn check_nonempty(ys: &[f64]) -> Result<()> {
    if ys.is_empty() {
        Err(Error::domain("need at least one observation"))
    } else {
        Ok(())
    }
}

/// Marginal intervals `mean_i ± L * r_i(alpha, tau)` for every coordinate.
pub fn interval_batch(ys: &[f64], tau: GlobalScale, alpha: f64, blowup: f64) -> Result<Vec<CredibleInterval>> {
    check_alpha(alpha)?;
    check_blowup(blowup)?;
    par::try_map_slice(ys, |i, &y| {
        CoordinatePosterior::new(y, tau)
            .and_then(|p| p.marginal_interval(alpha, blowup))
            .map_err(|e| e.at(i))
    })
}

/// Posterior means for every coordinate.
pub fn posterior_means(ys: &[f64], tau: GlobalScale) -> Result<Vec<f64>> {
    par::try_map_slice(ys, |i, &y| crate::kernels::posterior_mean(y, tau).map_err(|e| e.at(i)))
}

/// Monte Carlo radius of the `l2` credible ball around the posterior mean:
/// the empirical `(1 - alpha)`-quantile of `||theta - mean||_2` over `draws`
/// exact posterior draws. Coordinate `i` uses random stream `i` of `seed`, so
/// the result does not depend on the thread count. Returns the radius and
/// its standard error from the spacing of neighbouring order statistics.
pub fn ball_radius(ys: &[f64], tau: GlobalScale, alpha: f64, draws: usize, seed: u64) -> Result<(f64, f64)> {
    let (norms, _) = ball_norms(ys, tau, alpha, draws, seed)?;
    Ok((order_statistic(&norms, 1.0 - alpha), quantile_standard_error(&norms, 1.0 - alpha)))
}

/// Sorted draws of `||theta - mean||_2` and the posterior mean vector.
fn ball_norms(ys: &[f64], tau: GlobalScale, alpha: f64, draws: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_alpha(alpha)?;
    check_nonempty(ys)?;
    if draws < MIN_BALL_DRAWS {
        return Err(Error::InsufficientDraws {
            got: draws,
            need: MIN_BALL_DRAWS,
        });
    }
    let chunks = ys.len().div_ceil(BALL_CHUNK);
    let parts = par::try_map_range(chunks, |c| -> Result<(Vec<f64>, Vec<f64>)> {
        let lo = c * BALL_CHUNK;
        let hi = (lo + BALL_CHUNK).min(ys.len());
        let mut acc = vec![0.0; draws];
        let mut means = Vec::with_capacity(hi - lo);
        for (i, &y) in ys.iter().enumerate().take(hi).skip(lo) {
            let post = CoordinatePosterior::new(y, tau).map_err(|e| e.at(i))?;
            let m = post.mean();
            let mut rng = rng::stream(seed, i as u64);
            for a in acc.iter_mut() {
                let d = post.rand_draw(&mut rng) - m;
                *a += d * d;
            }
            means.push(m);
        }
        Ok((acc, means))
    })?;
    let mut total = vec![0.0; draws];
    let mut center = Vec::with_capacity(ys.len());
    for (acc, means) in parts {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
        center.extend(means);
    }
    let mut norms: Vec<f64> = total.into_iter().map(f64::sqrt).collect();
    norms.sort_by(f64::total_cmp);
    Ok((norms, center))
}

/// Moment approximation of the ball radius: with `W = ||theta - mean||^2`,
/// `sqrt(E W + z_{1-alpha} sd(W))` from the posterior variances and fourth
/// central moments.
pub fn ball_radius_approx(ys: &[f64], tau: GlobalScale, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_nonempty(ys)?;
    let moments = par::try_map_slice(ys, |i, &y| {
        let k = crate::kernels::Kernels::new(y, tau).map_err(|e| e.at(i))?;
        let v = k.posterior_variance();
        Ok((v, k.posterior_fourth_central() - v * v))
    })?;
    let mean = sorted_sum(moments.iter().map(|m| m.0).collect());
    let var = sorted_sum(moments.iter().map(|m| m.1).collect());
    let w = mean + norm_quantile(1.0 - alpha) * var.max(0.0).sqrt();
    Ok(w.max(0.0).sqrt())
}

/// Credible ball `{theta : ||theta - mean|| <= L * r(alpha, tau)}` with the
/// Monte Carlo radius.
pub fn credible_ball(ys: &[f64], tau: GlobalScale, alpha: f64, blowup: f64, draws: usize, seed: u64) -> Result<CredibleBall> {
    check_blowup(blowup)?;
    let (norms, center) = ball_norms(ys, tau, alpha, draws, seed)?;
    let r = order_statistic(&norms, 1.0 - alpha);
    Ok(CredibleBall {
        center,
        radius: blowup * r,
        alpha,
        blowup_l: blowup,
        mc_draws: draws,
        mc_se: quantile_standard_error(&norms, 1.0 - alpha),
        approx: false,
    })
}

/// [`credible_ball`] with the moment-approximation radius.
pub fn credible_ball_approx(ys: &[f64], tau: GlobalScale, alpha: f64, blowup: f64) -> Result<CredibleBall> {
    check_blowup(blowup)?;
    let r = ball_radius_approx(ys, tau, alpha)?;
    Ok(CredibleBall {
        center: posterior_means(ys, tau)?,
        radius: blowup * r,
        alpha,
        blowup_l: blowup,
        mc_draws: 0,
        mc_se: 0.0,
        approx: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegionLabel {
    Small,
    Medium,
    Large,
    Unclassified,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 4] = [
        RegionLabel::Small,
        RegionLabel::Medium,
        RegionLabel::Large,
        RegionLabel::Unclassified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegionLabel::Small => "small",
            RegionLabel::Medium => "medium",
            RegionLabel::Large => "large",
            RegionLabel::Unclassified => "unclassified",
        }
    }
}

/// Region boundaries: small is `|theta| <= k_s * tau`, medium is
/// `f * tau <= |theta| <= k_m * zeta_tau`, large is `|theta| >= k_l * zeta_tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RegionConstants {
    pub k_s: f64,
    pub k_m: f64,
    pub k_l: f64,
    pub f: f64,
}

impl Default for RegionConstants {
    fn default() -> Self {
        RegionConstants {
            k_s: 1.0,
            k_m: 0.9,
            k_l: 1.1,
            f: 2.0,
        }
    }
}

impl RegionConstants {
    fn validate(&self) -> Result<()> {
        let RegionConstants { k_s, k_m, k_l, f } = *self;
        if !(k_s > 0.0 && k_m > 0.0 && k_m < 1.0 && k_l > 1.0 && f > 0.0) {
            return Err(Error::config(format!(
                "region constants need k_s > 0, 0 < k_m < 1, k_l > 1, f > 0; got {self:?}"
            )));
        }
        if f <= k_s {
            return Err(Error::config(format!(
                "small and medium regions overlap: f = {f} <= k_s = {k_s}"
            )));
        }
        Ok(())
    }
}

fn label(x: f64, small: f64, med_lo: f64, med_hi: f64, large: f64) -> RegionLabel {
    let a = x.abs();
    if a <= small {
        RegionLabel::Small
    } else if a >= large {
        RegionLabel::Large
    } else if a >= med_lo && a <= med_hi {
        RegionLabel::Medium
    } else {
        RegionLabel::Unclassified
    }
}

/// Regions at a fixed global scale `tau`.
pub fn classify_regions(theta0: &[f64], tau: GlobalScale, k: &RegionConstants) -> Result<Vec<RegionLabel>> {
    k.validate()?;
    let (t, z) = (tau.get(), tau.zeta());
    Ok(theta0
        .iter()
        .map(|&x| label(x, k.k_s * t, k.f * t, k.k_m * z, k.k_l * z))
        .collect())
}

/// Regions for adaptive (estimated) `tau`, defined through the sparsity
/// level `p`: small is `|theta| <= k_s / n`, medium is
/// `f tau_n(p) <= |theta| <= k_m sqrt(2 log(1 / tau_n(p)))` and large is
/// `|theta| >= k_l sqrt(2 log n)`.
pub fn classify_regions_adaptive(theta0: &[f64], p: usize, k: &RegionConstants) -> Result<Vec<RegionLabel>> {
    let n = theta0.len();
    if p == 0 || p > n {
        return Err(Error::domain(format!("need 1 <= p <= n, got p = {p}, n = {n}")));
    }
    let RegionConstants { k_s, k_m, k_l, f } = *k;
    if !(k_s > 0.0 && k_m > 0.0 && k_m < 1.0 && k_l > 1.0 && f > 0.0) {
        return Err(Error::config(format!("invalid region constants {k:?}")));
    }
    let nf = n as f64;
    let tn = tau_rate(n, p);
    let small = k_s / nf;
    let med_lo = f * tn;
    if med_lo <= small {
        return Err(Error::config(format!(
            "small and medium regions overlap: f tau_n(p) = {med_lo} <= k_s / n = {small}"
        )));
    }
    let med_hi = k_m * zeta(tn);
    let large = k_l * (2.0 * nf.ln()).sqrt();
    Ok(theta0.iter().map(|&x| label(x, small, med_lo, med_hi, large)).collect())
}

/// `#(i : |theta_i| >= A sqrt(2 log(n/p))) >= p / C_s`.
pub fn self_similar_check(theta0: &[f64], p: usize, a: f64, c_s: f64) -> Result<bool> {
    let n = theta0.len();
    if p == 0 || p > n {
        return Err(Error::domain(format!("need 1 <= p <= n, got p = {p}, n = {n}")));
    }
    if !(a > 1.0 && c_s >= 1.0) {
        return Err(Error::domain(format!("need A > 1 and C_s >= 1, got A = {a}, C_s = {c_s}")));
    }
    let threshold = a * (2.0 * (n as f64 / p as f64).ln()).sqrt();
    let count = theta0.iter().filter(|x| x.abs() >= threshold).count();
    Ok(count as f64 >= p as f64 / c_s)
}

/// Constants `(A, C_s, C)` of the excessive-bias restriction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct BiasConstants {
    pub a: f64,
    pub c_s: f64,
    pub c: f64,
}

impl Default for BiasConstants {
    fn default() -> Self {
        BiasConstants {
            a: 2.0,
            c_s: 1.0,
            c: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcessiveBiasReport {
    pub satisfied: bool,
    pub q: Option<usize>,
    pub p_tilde: usize,
    pub constants: BiasConstants,
}

/// Coordinates sorted by decreasing magnitude, with prefix sums of squares,
/// for evaluating the restriction at many `q`.
struct SortedMagnitudes {
    desc: Vec<f64>,
    prefix_sq: Vec<f64>,
}

impl SortedMagnitudes {
    fn new(theta0: &[f64]) -> Self {
        let mut desc: Vec<f64> = theta0.iter().map(|x| x.abs()).collect();
        desc.sort_by(|a, b| b.total_cmp(a));
        let mut prefix_sq = Vec::with_capacity(desc.len() + 1);
        prefix_sq.push(0.0);
        let mut s = 0.0;
        for &x in &desc {
            s += x * x;
            prefix_sq.push(s);
        }
        SortedMagnitudes { desc, prefix_sq }
    }

    /// `(#(|theta| >= t), sum_{|theta| < t} theta^2)`.
    fn split(&self, t: f64) -> (usize, f64) {
        let count = self.desc.partition_point(|&x| x >= t);
        let total = *self.prefix_sq.last().expect("prefix sums start at 0");
        (count, (total - self.prefix_sq[count]).max(0.0))
    }

    /// Both inequalities at `q`, and the exceedance count.
    fn holds(&self, q: usize, k: &BiasConstants) -> (bool, usize) {
        let n = self.desc.len() as f64;
        let qf = q as f64;
        let log_ratio = (n / qf).ln();
        let (count, below) = self.split(k.a * (2.0 * log_ratio).sqrt());
        let ok = below <= k.c * qf * log_ratio && count as f64 >= qf / k.c_s;
        (ok, count)
    }
}

fn check_bias_constants(k: &BiasConstants) -> Result<()> {
    if k.a > 1.0 && k.c_s > 0.0 && k.c > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("need A > 1, C_s > 0, C > 0; got {k:?}")))
    }
}

/// Whether the excessive-bias inequalities hold at a given `q`.
pub fn excessive_bias_holds_at(theta0: &[f64], q: usize, k: &BiasConstants) -> Result<bool> {
    check_bias_constants(k)?;
    if q == 0 || q > theta0.len() {
        return Err(Error::domain(format!("need 1 <= q <= n, got q = {q}")));
    }
    Ok(SortedMagnitudes::new(theta0).holds(q, k).0)
}

/// Smallest `q` in `1..n` at which the excessive-bias restriction holds,
/// with `p~ = #(|theta_i| >= A sqrt(2 log(n/q)))` there. `q = n` is left out:
/// its threshold is zero, so it would hold for every vector.
pub fn excessive_bias_diagnostic(theta0: &[f64], k: &BiasConstants) -> Result<ExcessiveBiasReport> {
    check_bias_constants(k)?;
    let sorted = SortedMagnitudes::new(theta0);
    for q in 1..theta0.len() {
        let (ok, count) = sorted.holds(q, k);
        if ok {
            return Ok(ExcessiveBiasReport {
                satisfied: true,
                q: Some(q),
                p_tilde: count,
                constants: *k,
            });
        }
    }
    Ok(ExcessiveBiasReport {
        satisfied: false,
        q: None,
        p_tilde: 0,
        constants: *k,
    })
}

/// Blow-up factors for the small and large regions,
/// `L_S = (2.1 / z_alpha) (k_S + (2/gamma) zeta_{gamma/2})` and
/// `L_L = (1.1 / z_alpha) zeta_{gamma/2}`, with `z_alpha` the upper
/// `alpha`-quantile of the standard normal. These are asymptotic constants;
/// nothing is claimed for finite `n`.
pub fn region_blowups(alpha: f64, gamma: f64, k_s: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 0.5) || !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("need 0 < alpha < 1/2 and 0 < gamma < 1, got {alpha}, {gamma}")));
    }
    let z_alpha = norm_quantile(1.0 - alpha);
    let zg = zeta(0.5 * gamma);
    Ok(((2.1 / z_alpha) * (k_s + (2.0 / gamma) * zg), (1.1 / z_alpha) * zg))
}

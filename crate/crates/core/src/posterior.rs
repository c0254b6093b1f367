//! The posterior of a single mean given its observation and the global scale.
//!
//! Given `(y, tau)` the posterior of `theta` is a scale mixture of normals:
//! with the shrinkage weight `z = lambda^2 tau^2 / (1 + lambda^2 tau^2)`,
//! `theta | z ~ N(z y, z)` and `z` has density proportional to
//! `z^{-1/2} (tau^2 + (1 - tau^2) z)^{-1} exp(y^2 z / 2)` on `(0, 1)`.
//! Mixture integrals are taken over `u = sqrt(z)`.

use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::credible::CredibleInterval;
use crate::error::{Error, Result};
use crate::kernels::{self, Kernels};
use crate::numeric::quad::{self, Tolerance};
use crate::numeric::roots;
use crate::numeric::special::{norm_cdf, norm_pdf, norm_quantile, norm_sf};
use crate::scale::{GlobalScale, KernelOrder};

const MASS_TOL: Tolerance = Tolerance::new(1e-12, 1e-12);
/// Accuracy demanded of the coverage of a credible interval.
const RADIUS_MASS_TOL: f64 = 1e-10;
const QUANTILE_TOL: f64 = 1e-11;

/// Law of the shrinkage weight `z` given the observation.
#[derive(Debug, Clone)]
pub struct ShrinkWeightLaw {
    y: f64,
    tau: GlobalScale,
    a: f64,
    t2: f64,
    c2: f64,
    /// `1 / (exp(-a) I_{-1/2})`.
    inv_norm: f64,
    mean: f64,
    breaks: Vec<f64>,
    envelope: OnceLock<Envelope>,
}

impl ShrinkWeightLaw {
    pub fn new(y: f64, tau: GlobalScale) -> Result<Self> {
        Ok(Self::from_kernels(&Kernels::new(y, tau)?, tau))
    }

    fn from_kernels(k: &Kernels, tau: GlobalScale) -> Self {
        let y = k.y();
        let a = 0.5 * y * y;
        let t = tau.get();
        ShrinkWeightLaw {
            y,
            tau,
            a,
            t2: t * t,
            c2: 1.0 - t * t,
            inv_norm: (-k.log_i_reduced(KernelOrder::MinusHalf)).exp(),
            mean: k.shrinkage_weight(),
            breaks: kernels::shrinkage_breaks(a, t),
            envelope: OnceLock::new(),
        }
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn tau(&self) -> GlobalScale {
        self.tau
    }

    /// `E[z | y]`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Density of `u = sqrt(z)`.
    #[inline]
    fn u_density(&self, u: f64) -> f64 {
        let u2 = u * u;
        2.0 * (self.a * (u2 - 1.0)).exp() / (self.t2 + self.c2 * u2) * self.inv_norm
    }

    /// Density of `z` on `(0, 1]`; zero outside.
    pub fn density(&self, z: f64) -> f64 {
        if z <= 0.0 || z > 1.0 {
            return 0.0;
        }
        (self.a * (z - 1.0)).exp() / (z.sqrt() * (self.t2 + self.c2 * z)) * self.inv_norm
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        if z >= 1.0 {
            return Ok(1.0);
        }
        let top = z.sqrt();
        let mut breaks: Vec<f64> = self.breaks.iter().copied().filter(|&b| b < top).collect();
        breaks.push(top);
        let (v, _) = quad::integrate_scalar(|u| self.u_density(u), &breaks, MASS_TOL, "shrinkage weight cdf")?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Exact draw of `z` by rejection from a piecewise envelope.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.envelope
            .get_or_init(|| Envelope::new(self.a, self.tau.get()))
            .sample(rng)
    }
}

/// Piecewise proposal for `u = sqrt(z)`: on each piece the factor
/// `exp(a (u^2 - 1))` is bounded by its value at the right end and the
/// remaining Lorentzian `1 / (tau^2 + c^2 u^2)` is sampled exactly through
/// its arctangent CDF. Pieces are uniform in `u^2` with width `1 / (2a)`, so
/// the acceptance rate stays above `exp(-1/2)`.
#[derive(Debug, Clone)]
struct Envelope {
    a: f64,
    /// `c / tau`; zero at `tau = 1`, where the Lorentzian is flat.
    ratio: f64,
    pieces: Vec<Piece>,
    cumulative: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    u_l: f64,
    u_r: f64,
    w_r: f64,
    x_l: f64,
    span: f64,
}

impl Envelope {
    fn new(a: f64, tau: f64) -> Self {
        let c = (1.0 - tau * tau).sqrt();
        let ratio = c / tau;
        let (w_lo, count) = if a <= 1.0 {
            (0.0, 1)
        } else {
            // Below 1 - 80/a the mass is under exp(-80) relative to the ramp.
            let w_lo = if a > 2000.0 { 1.0 - 80.0 / a } else { 0.0 };
            (w_lo, ((1.0 - w_lo) * 2.0 * a).ceil() as usize)
        };
        let mut pieces = Vec::with_capacity(count);
        let mut cumulative = Vec::with_capacity(count);
        let mut total = 0.0;
        for j in 0..count {
            let w_l = w_lo + (1.0 - w_lo) * j as f64 / count as f64;
            let w_r = if j + 1 == count {
                1.0
            } else {
                w_lo + (1.0 - w_lo) * (j + 1) as f64 / count as f64
            };
            let (u_l, u_r) = (w_l.sqrt(), w_r.sqrt());
            let (x_l, x_r) = (ratio * u_l, ratio * u_r);
            let span = if ratio > 0.0 {
                ((x_r - x_l) / (1.0 + x_r * x_l)).atan()
            } else {
                u_r - u_l
            };
            // Mass up to the common factor 2 / (tau c) (or 2 / tau^2).
            total += span * (a * (w_r - 1.0)).exp();
            pieces.push(Piece {
                u_l,
                u_r,
                w_r,
                x_l,
                span,
            });
            cumulative.push(total);
        }
        Envelope {
            a,
            ratio,
            pieces,
            cumulative,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = *self.cumulative.last().expect("non-empty envelope");
        loop {
            let v = rng.random::<f64>() * total;
            let idx = self.cumulative.partition_point(|&c| c <= v).min(self.pieces.len() - 1);
            let p = &self.pieces[idx];
            let u = if self.ratio > 0.0 {
                let t = (rng.random::<f64>() * p.span).tan();
                (p.x_l + t) / (1.0 - p.x_l * t) / self.ratio
            } else {
                p.u_l + rng.random::<f64>() * (p.u_r - p.u_l)
            };
            let u = u.clamp(p.u_l, p.u_r);
            let z = u * u;
            if rng.random::<f64>() <= (self.a * (z - p.w_r)).exp() {
                return z;
            }
        }
    }
}

/// `Phi(b) - Phi(a)` for `a <= b`, evaluated in whichever tail keeps it
/// accurate.
#[inline]
fn normal_band(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        norm_sf(a) - norm_sf(b)
    } else if b <= 0.0 {
        norm_cdf(b) - norm_cdf(a)
    } else {
        1.0 - norm_cdf(a) - norm_sf(b)
    }
}

/// Posterior of one mean `theta_i` given `Y_i = y` and the global scale.
#[derive(Debug, Clone)]
pub struct CoordinatePosterior {
    kernels: Kernels,
    law: ShrinkWeightLaw,
    mean: f64,
    variance: f64,
}

impl CoordinatePosterior {
    pub fn new(y: f64, tau: GlobalScale) -> Result<Self> {
        let kernels = Kernels::new(y, tau)?;
        let law = ShrinkWeightLaw::from_kernels(&kernels, tau);
        Ok(CoordinatePosterior {
            mean: kernels.posterior_mean(),
            variance: kernels.posterior_variance(),
            kernels,
            law,
        })
    }

    pub fn y(&self) -> f64 {
        self.law.y
    }

    pub fn tau(&self) -> GlobalScale {
        self.law.tau
    }

    pub fn kernels(&self) -> &Kernels {
        &self.kernels
    }

    pub fn shrink_weight_law(&self) -> &ShrinkWeightLaw {
        &self.law
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    fn band_breaks(&self, ends: &[f64]) -> Vec<f64> {
        let y = self.law.y;
        let mut b = self.law.breaks.clone();
        for &t in ends {
            if !t.is_finite() {
                continue;
            }
            if y != 0.0 {
                let r = t / y;
                if r > 0.0 && r < 1.0 {
                    b.push(r.sqrt());
                }
            }
            if t != 0.0 && t.abs() < 1.0 {
                b.push(t.abs());
            }
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Posterior mass of `[lo, hi]` and the posterior densities at `lo` and
    /// `hi` (infinite ends have zero density). The density has a pole at
    /// zero, reported as infinity.
    fn band(&self, lo: f64, hi: f64, with_density: bool) -> Result<[f64; 3]> {
        let y = self.law.y;
        if self.law.a > kernels::RAMP_A {
            return self.band_ramp(lo, hi, with_density);
        }
        let breaks = self.band_breaks(&[lo, hi]);
        if !with_density {
            let (m, _) = quad::integrate_scalar(
                |u| {
                    let z = u * u;
                    self.law.u_density(u) * normal_band((lo - z * y) / u, (hi - z * y) / u)
                },
                &breaks,
                MASS_TOL,
                "posterior mass",
            )?;
            return Ok([m.clamp(0.0, 1.0), f64::NAN, f64::NAN]);
        }
        let est = quad::integrate(
            |u| {
                let z = u * u;
                let w = self.law.u_density(u);
                let (al, bh) = ((lo - z * y) / u, (hi - z * y) / u);
                [
                    w * normal_band(al, bh),
                    if lo.is_finite() && lo != 0.0 { w * norm_pdf(al) / u } else { 0.0 },
                    if hi.is_finite() && hi != 0.0 { w * norm_pdf(bh) / u } else { 0.0 },
                ]
            },
            &breaks,
            MASS_TOL,
            "posterior mass",
        )?;
        let pole = |t: f64, d: f64| if t == 0.0 { f64::INFINITY } else { d };
        Ok([est.value[0].clamp(0.0, 1.0), pole(lo, est.value[1]), pole(hi, est.value[2])])
    }

    /// [`Self::band`] for large `|y|`, integrating in `v = a (1 - z)` so that
    /// `t - z y = (t - y) + y v / a` keeps its digits.
    fn band_ramp(&self, lo: f64, hi: f64, with_density: bool) -> Result<[f64; 3]> {
        let (y, a) = (self.law.y, self.law.a);
        let mut breaks = kernels::ramp_breaks(a);
        let top = breaks[breaks.len() - 1];
        for t in [lo, hi] {
            let v = a * (1.0 - t / y);
            if t.is_finite() && v > 0.0 && v < top {
                breaks.push(v);
            }
        }
        breaks.sort_by(f64::total_cmp);
        let (dlo, dhi) = (lo - y, hi - y);
        let est = quad::integrate(
            |v| {
                let z = (a - v) / a;
                let u = z.sqrt();
                let w = (-v).exp() / (u * (self.law.t2 + self.law.c2 * z)) * self.law.inv_norm / a;
                let shift = y * (v / a);
                let (al, bh) = ((dlo + shift) / u, (dhi + shift) / u);
                if !with_density {
                    return [w * normal_band(al, bh), 0.0, 0.0];
                }
                [
                    w * normal_band(al, bh),
                    if lo.is_finite() { w * norm_pdf(al) / u } else { 0.0 },
                    if hi.is_finite() { w * norm_pdf(bh) / u } else { 0.0 },
                ]
            },
            &breaks,
            MASS_TOL,
            "posterior mass",
        )?;
        let m = est.value[0].clamp(0.0, 1.0);
        if with_density {
            Ok([m, est.value[1], est.value[2]])
        } else {
            Ok([m, f64::NAN, f64::NAN])
        }
    }

    /// `P(theta <= t | y, tau)`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t == f64::INFINITY {
            return Ok(1.0);
        }
        if t == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        // Integrate the smaller tail.
        if t >= self.mean {
            Ok(1.0 - self.band(t, f64::INFINITY, false)?[0])
        } else {
            Ok(self.band(f64::NEG_INFINITY, t, false)?[0])
        }
    }

    /// Posterior density of `theta` at `t` (infinite at zero).
    pub fn density(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.band(t, f64::INFINITY, true)?[1])
    }

    /// `P(|theta - center| <= r | y, tau)`.
    pub fn mass_around(&self, center: f64, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.band(center - r, center + r, false)?[0])
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        if self.law.y == 0.0 && p == 0.5 {
            return Ok(0.0);
        }
        let sd = self.variance.sqrt();
        let f = |t: f64| -> Result<(f64, f64)> {
            if t >= self.mean {
                let [m, d, _] = self.band(t, f64::INFINITY, true)?;
                Ok(((1.0 - p) - m, d))
            } else {
                let [m, _, d] = self.band(f64::NEG_INFINITY, t, true)?;
                Ok((m - p, d))
            }
        };
        let width = self.law.y.abs() + 10.0;
        let lo = expand(|t| Ok(f(t)?.0 < 0.0), self.mean, -width, "posterior quantile")?;
        let hi = expand(|t| Ok(f(t)?.0 > 0.0), self.mean, width, "posterior quantile")?;
        let guess = self.mean + sd * norm_quantile(p);
        roots::newton_increasing(f, lo, hi, guess, QUANTILE_TOL, "posterior quantile")
    }

    /// Exact posterior draw of `theta`.
    pub fn rand_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z = self.law.sample(rng);
        let e: f64 = rng.sample(StandardNormal);
        z * self.law.y + z.sqrt() * e
    }

    /// Radius `r` with `P(|theta - mean| <= r | y, tau) = 1 - alpha`.
    pub fn interval_radius(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let m = self.mean;
        let target = 1.0 - alpha;
        let f = |r: f64| -> Result<(f64, f64)> {
            let [mass, dl, dh] = self.band(m - r, m + r, true)?;
            Ok((mass - target, dl + dh))
        };
        let hi = roots::expand_upper(|r| Ok(self.band(m - r, m + r, false)?[0] - target), self.law.y.abs() + 10.0, "interval radius")?;
        let guess = norm_quantile(1.0 - 0.5 * alpha) * self.variance.sqrt();
        roots::newton_increasing(f, 0.0, hi, guess, RADIUS_MASS_TOL, "interval radius")
    }

    /// Interval `mean ± L * interval_radius(alpha)`.
    pub fn marginal_interval(&self, alpha: f64, blowup: f64) -> Result<CredibleInterval> {
        if !(blowup > 0.0) {
            return Err(Error::domain(format!("blow-up factor must be positive, got {blowup}")));
        }
        Ok(CredibleInterval::new(self.mean, self.interval_radius(alpha)?, alpha, blowup))
    }
}

/// Steps outward from `start` by `step`, doubling, until `done` holds.
fn expand<F>(mut done: F, start: f64, step: f64, context: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    let mut s = step;
    for _ in 0..60 {
        let t = start + s;
        if done(t)? {
            return Ok(t);
        }
        s *= 2.0;
    }
    Err(Error::Numerical {
        context,
        estimate: start + s,
    })
}

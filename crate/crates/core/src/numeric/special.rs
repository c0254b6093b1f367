//! Normal distribution helpers and log-space regularized incomplete gamma
//! functions.

use std::f64::consts::FRAC_1_SQRT_2;

use libm::{erfc, lgamma as ln_gamma};
use statrs::function::erf::erfc_inv;

use super::{log1m_exp, log_add_exp};

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

#[inline]
pub fn norm_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal CDF, accurate in both tails.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)`.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal quantile: the `erfc_inv` starting value is polished by
/// Halley steps against the full-precision CDF.
pub fn norm_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile level must lie in (0, 1)");
    let mut x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        // Work in the tail that keeps the residual well conditioned.
        let r = if x < 0.0 { norm_cdf(x) - p } else { (1.0 - p) - norm_sf(x) };
        let d = norm_pdf(x);
        if d == 0.0 || r == 0.0 {
            break;
        }
        let step = r / d;
        x -= step / (1.0 + 0.5 * x * step);
    }
    x
}

/// Logs of the regularized lower and upper incomplete gamma functions,
/// `(log P(a, x), log Q(a, x))`.
pub fn ln_gamma_pq(a: f64, x: f64) -> (f64, f64) {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x.is_infinite() {
        return (0.0, f64::NEG_INFINITY);
    }
    let log_prefix = a * x.ln() - x;
    if x < a + 1.0 {
        // Series: P = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)..(a+n)).
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        let lp = log_prefix - ln_gamma(a + 1.0) + sum.ln();
        (lp, log1m_exp(lp.min(0.0)))
    } else {
        // Modified Lentz continued fraction for Q.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let lq = log_prefix - ln_gamma(a) + h.ln();
        (log1m_exp(lq.min(0.0)), lq)
    }
}

/// Inverse CDF draw from `Gamma(shape, rate = 1)` restricted to `[lo, hi]`,
/// given a uniform variate `u` in `[0, 1)`. Works in log space, so extreme
/// truncation regions (both endpoints deep in one tail) stay accurate.
pub fn truncated_gamma_inverse(shape: f64, lo: f64, hi: f64, u: f64) -> f64 {
    debug_assert!(lo < hi);
    let (lp_lo, lq_lo) = ln_gamma_pq(shape, lo);
    let (lp_hi, lq_hi) = ln_gamma_pq(shape, hi);
    let use_lower = lp_hi <= (0.5f64).ln() || lq_lo > (0.5f64).ln();
    let (lx_lo, lx_hi) = (lo.max(1e-300).ln(), if hi.is_finite() { hi.ln() } else { f64::INFINITY });
    if use_lower {
        // target log P = log(P_lo + u (P_hi - P_lo))
        let mass = lp_hi + log1m_exp((lp_lo - lp_hi).min(0.0));
        let target = if lp_lo == f64::NEG_INFINITY {
            u.ln() + mass
        } else {
            log_add_exp(lp_lo, u.ln() + mass)
        };
        solve_log(|lx| ln_gamma_pq(shape, lx.exp()).0 - target, lx_lo, lx_hi, true)
    } else {
        // target log Q = log(Q_hi + (1-u)(Q_lo - Q_hi)); Q is decreasing.
        let mass = lq_lo + log1m_exp((lq_hi - lq_lo).min(0.0));
        let target = if lq_hi == f64::NEG_INFINITY {
            (1.0 - u).ln() + mass
        } else {
            log_add_exp(lq_hi, (1.0 - u).ln() + mass)
        };
        solve_log(|lx| ln_gamma_pq(shape, lx.exp()).1 - target, lx_lo, lx_hi, false)
    }
}

fn solve_log<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, increasing: bool) -> f64 {
    if !hi.is_finite() {
        // Expand an upper bound for an unbounded range.
        hi = lo.max(0.0) + 1.0;
        loop {
            let v = g(hi);
            if (increasing && v >= 0.0) || (!increasing && v <= 0.0) {
                break;
            }
            hi += 1.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-15 {
            break;
        }
        let v = g(mid);
        let above = if increasing { v >= 0.0 } else { v <= 0.0 };
        if above {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

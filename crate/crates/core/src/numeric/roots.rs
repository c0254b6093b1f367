//! Bracketing root finders.

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when `|f(x)| <= ftol` or the bracket is narrower than `xtol`.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, ftol: f64, context: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical {
            context,
            estimate: fa.abs().min(fb.abs()),
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= ftol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::Numerical {
        context,
        estimate: fb.abs(),
    })
}

/// Plain bisection for a monotone predicate: returns the boundary between
/// `lo` (where `above(lo)` is false) and `hi` (where it is true).
pub fn bisect<F>(mut above: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    for _ in 0..400 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Doubles `hi` (starting from `start > lo`) until `f(hi) >= 0`.
pub fn expand_upper<F>(mut f: F, start: f64, context: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut hi = start;
    for _ in 0..80 {
        if f(hi)? >= 0.0 {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::Numerical {
        context,
        estimate: hi,
    })
}

/// Newton's method for an increasing function, safeguarded by a bracket
/// `lo < hi` with `f(lo) < 0 < f(hi)`. `f` returns the value and derivative.
/// Steps leaving the bracket, or failing to halve the step before last
/// (slow progress where the derivative is huge), fall back to bisection.
/// Stops when `|f(x)| <= ftol`.
pub fn newton_increasing<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    ftol: f64,
    context: &'static str,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut best = f64::INFINITY;
    let (mut dx, mut dx_old) = (hi - lo, hi - lo);
    for _ in 0..200 {
        let (v, d) = f(x)?;
        best = best.min(v.abs());
        if v.abs() <= ftol {
            return Ok(x);
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        let step = x - v / d;
        let next = if d > 0.0 && step > lo && step < hi && step != x && (step - x).abs() <= 0.5 * dx_old {
            step
        } else {
            0.5 * (lo + hi)
        };
        (dx_old, dx) = (dx, (next - x).abs());
        x = next;
    }
    Err(Error::Numerical {
        context,
        estimate: best,
    })
}

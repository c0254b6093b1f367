//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature over a list of
//! breakpoints, for vector-valued integrands sharing one set of panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Convergence targets: component `j` is accepted once its error estimate
/// is at most `max(abs, rel * |value_j|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<const M: usize> {
    pub value: [f64; M],
    pub error: [f64; M],
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct Panel<const M: usize> {
    a: f64,
    b: f64,
    value: [f64; M],
    error: [f64; M],
    floor: [f64; M],
    priority: f64,
}

impl<const M: usize> PartialEq for Panel<M> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const M: usize> Eq for Panel<M> {}
impl<const M: usize> PartialOrd for Panel<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const M: usize> Ord for Panel<M> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

/// QUADPACK error rescaling. Returns the error estimate and the round-off
/// floor below which it cannot be pushed by subdivision.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> (f64, f64) {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(floor);
    }
    (e, floor)
}

fn gk21<const M: usize, F>(f: &F, a: f64, b: f64) -> ([f64; M], [f64; M], [f64; M])
where
    F: Fn(f64) -> [f64; M],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = [0.0; M];
    let mut res_g = [0.0; M];
    let mut res_abs = [0.0; M];
    let mut fv1 = [[0.0; M]; 10];
    let mut fv2 = [[0.0; M]; 10];
    for j in 0..M {
        res_k[j] = fc[j] * WGK[10];
        res_abs[j] = res_k[j].abs();
    }
    for (i, (v1, v2)) in fv1.iter_mut().zip(fv2.iter_mut()).enumerate() {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for j in 0..M {
            let s = f1[j] + f2[j];
            res_k[j] += WGK[i] * s;
            res_abs[j] += WGK[i] * (f1[j].abs() + f2[j].abs());
            if i % 2 == 1 {
                res_g[j] += WG[i / 2] * s;
            }
        }
        *v1 = f1;
        *v2 = f2;
    }
    let mut value = [0.0; M];
    let mut error = [0.0; M];
    let mut floor = [0.0; M];
    for j in 0..M {
        let mean = 0.5 * res_k[j];
        let mut res_asc = WGK[10] * (fc[j] - mean).abs();
        for i in 0..10 {
            res_asc += WGK[i] * ((fv1[i][j] - mean).abs() + (fv2[i][j] - mean).abs());
        }
        let h = half.abs();
        value[j] = res_k[j] * half;
        (error[j], floor[j]) = rescale_error((res_k[j] - res_g[j]) * half, res_abs[j] * h, res_asc * h);
    }
    (value, error, floor)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// delimited by `breaks` (ascending, at least two points) and bisecting the
/// worst panel until every component meets `tol`.
pub fn integrate<const M: usize, F>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
    context: &'static str,
) -> Result<Estimate<M>>
where
    F: Fn(f64) -> [f64; M],
{
    assert!(breaks.len() >= 2, "need at least one panel");
    let mut total = [0.0; M];
    let mut total_err = [0.0; M];
    // Panels that can no longer be improved by splitting: too narrow, or
    // already at the round-off floor.
    let mut frozen: Vec<Panel<M>> = Vec::new();
    let mut frozen_err = [0.0; M];

    let mut panels = Vec::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (value, error, floor) = gk21(&f, a, b);
        for j in 0..M {
            total[j] += value[j];
            total_err[j] += error[j];
        }
        panels.push(Panel {
            a,
            b,
            value,
            error,
            floor,
            priority: 0.0,
        });
    }

    let priority = |error: &[f64; M], total: &[f64; M]| -> f64 {
        let mut worst = 0.0f64;
        for j in 0..M {
            let target = tol.abs.max(tol.rel * total[j].abs());
            let r = if target > 0.0 { error[j] / target } else { error[j] };
            worst = worst.max(r);
        }
        worst
    };
    let converged = |total_err: &[f64; M], frozen_err: &[f64; M], total: &[f64; M]| -> bool {
        (0..M).all(|j| total_err[j] - frozen_err[j] <= tol.abs.max(tol.rel * total[j].abs()))
    };

    for p in panels.iter_mut() {
        p.priority = priority(&p.error, &total);
    }
    let mut heap: BinaryHeap<Panel<M>> = panels.into_iter().collect();

    loop {
        if converged(&total_err, &frozen_err, &total) {
            break;
        }
        if heap.len() + frozen.len() >= tol.max_panels {
            let worst = (0..M).map(|j| total_err[j]).fold(0.0, f64::max);
            return Err(Error::Numerical {
                context,
                estimate: worst,
            });
        }
        let Some(panel) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (panel.a + panel.b);
        let narrow = mid <= panel.a
            || mid >= panel.b
            || (panel.b - panel.a) < 1e-15 * panel.a.abs().max(panel.b.abs());
        let at_floor = (0..M).all(|j| panel.error[j] <= panel.floor[j] * (1.0 + 1e-9));
        if narrow || at_floor {
            for (acc, e) in frozen_err.iter_mut().zip(&panel.error) {
                *acc += e;
            }
            frozen.push(panel);
            continue;
        }
        let (lv, le, lf) = gk21(&f, panel.a, mid);
        let (rv, re, rf) = gk21(&f, mid, panel.b);
        for j in 0..M {
            total[j] += lv[j] + rv[j] - panel.value[j];
            total_err[j] += le[j] + re[j] - panel.error[j];
        }
        heap.push(Panel {
            a: panel.a,
            b: mid,
            value: lv,
            error: le,
            floor: lf,
            priority: priority(&le, &total),
        });
        heap.push(Panel {
            a: mid,
            b: panel.b,
            value: rv,
            error: re,
            floor: rf,
            priority: priority(&re, &total),
        });
    }

    // Re-sum from the final panels to shed accumulated update round-off.
    let mut parts: Vec<Panel<M>> = heap.into_vec();
    parts.extend(frozen);
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = [0.0; M];
    let mut error = [0.0; M];
    for p in &parts {
        for j in 0..M {
            value[j] += p.value[j];
            error[j] += p.error[j];
        }
    }
    Ok(Estimate {
        value,
        error,
        panels: parts.len(),
    })
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(f: F, breaks: &[f64], tol: Tolerance, context: &'static str) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| [f(x)], breaks, tol, context)?;
    Ok((est.value[0], est.error[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate_scalar(|x| x.powi(5) - 2.0 * x, &[0.0, 2.0], Tolerance::new(1e-14, 1e-14), "t").unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn sqrt_singularity_refines() {
        let (v, e) = integrate_scalar(|x| 1.0 / x.sqrt(), &[0.0, 1.0], Tolerance::new(1e-10, 1e-10), "t").unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v} {e}");
    }

    #[test]
    fn vector_components_share_panels() {
        let est = integrate(|x| [x.exp(), (3.0 * x).sin()], &[0.0, 0.5, 1.0], Tolerance::new(0.0, 1e-13), "t").unwrap();
        assert!((est.value[0] - (1f64.exp() - 1.0)).abs() < 1e-13);
        assert!((est.value[1] - (1.0 - 3f64.cos()) / 3.0).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_panels: 3,
        };
        let err = integrate_scalar(|x| (1.0 / x).sin(), &[1e-6, 1.0], tol, "osc").unwrap_err();
        match err {
            Error::Numerical { context, estimate } => {
                assert_eq!(context, "osc");
                assert!(estimate > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

//! Numerical building blocks: adaptive quadrature, bracketing root finders,
//! special functions and reproducible summation.

pub mod quad;
pub mod roots;
pub mod special;

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of the values in ascending order, so the result does not
/// depend on the order they came in.
pub fn sorted_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    pairwise_sum(&xs)
}

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(1 - exp(x))` for `x <= 0`.
#[inline]
pub fn log1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Empirical quantile: smallest order statistic whose ECDF value reaches `p`.
/// `sorted` must be ascending and non-empty.
pub fn order_statistic(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

/// Standard error of the empirical `p`-quantile from the spacing of the
/// order statistics one binomial standard deviation either side of it.
pub fn quantile_standard_error(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len() as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    let lo = ((n * p - sd) / n).max(0.0);
    let hi = ((n * p + sd) / n).min(1.0);
    0.5 * (order_statistic(sorted, hi) - order_statistic(sorted, lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn log_helpers() {
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add_exp(1000.0, 0.0) - 1000.0).abs() < 1e-12);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
        assert!((log1m_exp(-1e-10) - (1e-10f64).ln()).abs() < 1e-8);
        assert!((log1m_exp(-5.0) - (1.0 - (-5f64).exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn quantiles() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(order_statistic(&xs, 0.95), 95.0);
        assert_eq!(order_statistic(&xs, 0.951), 96.0);
        assert_eq!(order_statistic(&xs, 0.0), 1.0);
        assert_eq!(order_statistic(&xs, 1.0), 100.0);
        assert!(quantile_standard_error(&xs, 0.5) > 0.0);
    }
}

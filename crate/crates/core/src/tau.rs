//! Empirical Bayes estimators of the global scale `tau`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{self, LikelihoodBatch};
use crate::numeric::{roots, sorted_sum};
use crate::par;
use crate::scale::GlobalScale;

/// Number of log-spaced grid points scanned for sign changes of the score.
pub const MMLE_GRID: usize = 200;
const MMLE_XTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TauMethod {
    Mmle,
    Simple,
    Fixed,
}

/// Trace of the MMLE search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmleDiagnostics {
    pub grid: Vec<f64>,
    pub log_lik: Vec<f64>,
    pub score: Vec<f64>,
    /// Grid intervals on which the score changes sign from + to -.
    pub sign_changes: Vec<(f64, f64)>,
    /// Candidates compared at the end, with their log likelihoods.
    pub candidates: Vec<(f64, f64)>,
    /// Grid interval bracketing the returned maximiser.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauEstimate {
    pub value: GlobalScale,
    pub method: TauMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<MmleDiagnostics>,
}

impl TauEstimate {
    pub fn fixed(tau: GlobalScale) -> Self {
        TauEstimate {
            value: tau,
            method: TauMethod::Fixed,
            diagnostics: None,
        }
    }

    pub fn tau(&self) -> f64 {
        self.value.get()
    }
}

fn check_sample(ys: &[f64]) -> Result<()> {
    if ys.len() < 2 {
        return Err(Error::domain(format!("need at least two observations, got {}", ys.len())));
    }
    Ok(())
}

/// Maximum marginal likelihood estimate of `tau` restricted to `[1/n, 1]`.
///
/// The score is scanned on a log-spaced grid; every `+ -> -` sign change is
/// refined by bisection and the log likelihood is compared across these
/// local maxima and both endpoints.
pub fn mmle(ys: &[f64]) -> Result<TauEstimate> {
    check_sample(ys)?;
    let n = ys.len() as f64;
    let batch = LikelihoodBatch::new(ys)?;
    let lo = 1.0 / n;
    let grid: Vec<f64> = (0..MMLE_GRID)
        .map(|j| match j {
            0 => lo,
            j if j + 1 == MMLE_GRID => 1.0,
            j => (lo.ln() * (1.0 - j as f64 / (MMLE_GRID - 1) as f64)).exp(),
        })
        .collect();
    let values = par::try_map_slice(&grid, |_, &t| batch.evaluate(GlobalScale::new(t)?))?;
    let log_lik: Vec<f64> = values.iter().map(|v| v.0).collect();
    let score: Vec<f64> = values.iter().map(|v| v.1).collect();

    let mut sign_changes = Vec::new();
    let mut candidates = vec![(grid[0], log_lik[0]), (1.0, log_lik[MMLE_GRID - 1])];
    for j in 0..MMLE_GRID - 1 {
        if score[j] > 0.0 && score[j + 1] <= 0.0 {
            let (a, b) = (grid[j], grid[j + 1]);
            sign_changes.push((a, b));
            let t = roots::bisect(
                |t| Ok(batch.evaluate(GlobalScale::new(t)?)?.1 <= 0.0),
                a,
                b,
                MMLE_XTOL * a,
            )?;
            candidates.push((t, batch.evaluate(GlobalScale::new(t)?)?.0));
        }
    }
    let &(best, _) = candidates
        .iter()
        .fold(None, |acc: Option<&(f64, f64)>, c| match acc {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
        .expect("candidates include both endpoints");
    let k = grid.partition_point(|&g| g < best);
    let bracket = if k == 0 {
        (grid[0], grid[0])
    } else if k >= MMLE_GRID {
        (1.0, 1.0)
    } else {
        (grid[k - 1], grid[k])
    };
    Ok(TauEstimate {
        value: GlobalScale::new(best.clamp(lo, 1.0))?,
        method: TauMethod::Mmle,
        diagnostics: Some(MmleDiagnostics {
            grid,
            log_lik,
            score,
            sign_changes,
            candidates,
            bracket,
        }),
    })
}

/// Counting estimator
/// `max(1, #{|Y_i| >= sqrt(c2 * 2 log n)}) / (c1 n)`, clamped to `[1/n, 1]`.
pub fn simple_estimator(ys: &[f64], c1: f64, c2: f64) -> Result<TauEstimate> {
    check_sample(ys)?;
    if !(c1 >= 1.0) || !(c2 > 0.0) {
        return Err(Error::domain(format!("need c1 >= 1 and c2 > 0, got c1 = {c1}, c2 = {c2}")));
    }
    let n = ys.len() as f64;
    let threshold = (c2 * 2.0 * n.ln()).sqrt();
    let count = ys.iter().filter(|y| y.abs() >= threshold).count().max(1);
    let t = (count as f64 / (c1 * n)).clamp(1.0 / n, 1.0);
    Ok(TauEstimate {
        value: GlobalScale::new(t)?,
        method: TauMethod::Simple,
        diagnostics: None,
    })
}

/// Derivative in `tau` of the log marginal likelihood,
/// `(1/tau) sum_i m_tau(Y_i)`.
pub fn score_sum(ys: &[f64], tau: GlobalScale) -> Result<f64> {
    let terms = par::try_map_slice(ys, |i, &y| kernels::score_m(y, tau).map_err(|e| e.at(i)))?;
    Ok(sorted_sum(terms) / tau.get())
}

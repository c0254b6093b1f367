//! Declaring signals from posterior summaries, and counting how well that
//! went against the truth.

use serde::Serialize;

use crate::credible::{CredibleInterval, RegionLabel};
use crate::error::{Error, Result};
use crate::kernels::Kernels;
use crate::par;
use crate::scale::GlobalScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SelectionMethod {
    IntervalEB,
    IntervalHB,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SelectionParams {
    pub alpha: Option<f64>,
    pub blowup_l: Option<f64>,
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub selected: Vec<bool>,
    pub method: SelectionMethod,
    pub params: SelectionParams,
}

impl SelectionResult {
    pub fn count(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    pub fn with_method(mut self, method: SelectionMethod) -> Self {
        self.method = method;
        self
    }
}

/// Selects coordinates whose interval excludes zero.
pub fn select_by_interval(intervals: &[CredibleInterval]) -> SelectionResult {
    let params = intervals
        .first()
        .map(|iv| SelectionParams {
            alpha: Some(iv.alpha),
            blowup_l: Some(iv.blowup_l),
            cutoff: None,
        })
        .unwrap_or_default();
    SelectionResult {
        selected: intervals.iter().map(|iv| !iv.contains(0.0)).collect(),
        method: SelectionMethod::IntervalEB,
        params,
    }
}

/// Posterior shrinkage weights `kappa_i = E[theta_i | Y_i] / Y_i`, taken as
/// `I_{1/2} / I_{-1/2}` so that `Y_i = 0` is covered.
pub fn shrinkage_weights(ys: &[f64], tau: GlobalScale) -> Result<Vec<f64>> {
    par::try_map_slice(ys, |i, &y| Ok(Kernels::new(y, tau).map_err(|e| e.at(i))?.shrinkage_weight()))
}

/// Selects coordinates with `kappa_i > cutoff`.
pub fn select_by_threshold(ys: &[f64], tau: GlobalScale, cutoff: f64) -> Result<SelectionResult> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::domain(format!("cutoff must lie in (0, 1), got {cutoff}")));
    }
    let kappa = shrinkage_weights(ys, tau)?;
    Ok(SelectionResult {
        selected: kappa.iter().map(|&k| k > cutoff).collect(),
        method: SelectionMethod::Threshold,
        params: SelectionParams {
            cutoff: Some(cutoff),
            ..SelectionParams::default()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RegionCounts {
    pub small: usize,
    pub medium: usize,
    pub large: usize,
    pub unclassified: usize,
}

impl RegionCounts {
    fn bump(&mut self, r: RegionLabel) {
        match r {
            RegionLabel::Small => self.small += 1,
            RegionLabel::Medium => self.medium += 1,
            RegionLabel::Large => self.large += 1,
            RegionLabel::Unclassified => self.unclassified += 1,
        }
    }

    pub fn get(&self, r: RegionLabel) -> usize {
        match r {
            RegionLabel::Small => self.small,
            RegionLabel::Medium => self.medium,
            RegionLabel::Large => self.large,
            RegionLabel::Unclassified => self.unclassified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscoveryReport {
    /// `false_positives / max(1, selected)`.
    pub fdr: f64,
    pub selected: usize,
    pub false_positives: usize,
    /// Selected nonzero means, per region.
    pub true_discoveries: RegionCounts,
    /// All nonzero means, per region.
    pub signals: RegionCounts,
}

impl DiscoveryReport {
    /// Fraction of the nonzero means in `region` that were selected; `None`
    /// when the region holds none.
    pub fn detection_fraction(&self, region: RegionLabel) -> Option<f64> {
        let total = self.signals.get(region);
        (total > 0).then(|| self.true_discoveries.get(region) as f64 / total as f64)
    }
}

pub fn discovery_report(sel: &SelectionResult, theta0: &[f64], regions: &[RegionLabel]) -> Result<DiscoveryReport> {
    let n = sel.selected.len();
    for len in [theta0.len(), regions.len()] {
        if len != n {
            return Err(Error::LengthMismatch { left: n, right: len });
        }
    }
    let mut false_positives = 0;
    let mut true_discoveries = RegionCounts::default();
    let mut signals = RegionCounts::default();
    for i in 0..n {
        if theta0[i] == 0.0 {
            if sel.selected[i] {
                false_positives += 1;
            }
        } else {
            signals.bump(regions[i]);
            if sel.selected[i] {
                true_discoveries.bump(regions[i]);
            }
        }
    }
    let selected = sel.count();
    Ok(DiscoveryReport {
        fdr: false_positives as f64 / selected.max(1) as f64,
        selected,
        false_positives,
        true_discoveries,
        signals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(v: &[bool]) -> SelectionResult {
        SelectionResult {
            selected: v.to_vec(),
            method: SelectionMethod::IntervalEB,
            params: SelectionParams::default(),
        }
    }

    #[test]
    fn interval_rule() {
        let ivs = [
            CredibleInterval::from_endpoints(-1.0, 1.0, 0.05),
            CredibleInterval::from_endpoints(0.5, 2.0, 0.05),
            CredibleInterval::from_endpoints(0.0, 2.0, 0.05),
        ];
        assert_eq!(select_by_interval(&ivs).selected, vec![false, true, false]);
    }

    #[test]
    fn threshold_rule() {
        let t = GlobalScale::new(1.0).unwrap();
        let k = shrinkage_weights(&[0.0], t).unwrap()[0];
        assert!((k - 1.0 / 3.0).abs() < 1e-13);
        assert!(!select_by_threshold(&[0.0], t, 0.5).unwrap().selected[0]);
        let t = GlobalScale::new(0.05).unwrap();
        let k = shrinkage_weights(&[10.0], t).unwrap()[0];
        assert!((1.0 - k).abs() < t.zeta().powi(-2));
        assert!(select_by_threshold(&[10.0], t, 0.5).unwrap().selected[0]);
        assert!(select_by_threshold(&[1.0], t, 1.0).is_err());
    }

    #[test]
    fn discovery_counts() {
        use RegionLabel::*;
        let r = discovery_report(&sel(&[false, false]), &[0.0, 0.0], &[Small, Small]).unwrap();
        assert_eq!(r.fdr, 0.0);
        let r = discovery_report(&sel(&[true, true]), &[0.0, 0.0], &[Small, Small]).unwrap();
        assert_eq!(r.fdr, 1.0);
        let r = discovery_report(&sel(&[true, false, true]), &[0.0, 0.0, 3.0], &[Small, Small, Large]).unwrap();
        assert_eq!(r.fdr, 0.5);
        assert_eq!(r.true_discoveries.large, 1);
        assert_eq!(r.detection_fraction(Large), Some(1.0));
        assert_eq!(r.detection_fraction(Medium), None);
        assert!(discovery_report(&sel(&[true]), &[0.0, 1.0], &[Small, Small]).is_err());
    }
}

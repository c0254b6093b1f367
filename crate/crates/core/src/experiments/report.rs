use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::credible::RegionLabel;
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::par;
use crate::rng;
use crate::selection::{discovery_report, select_by_interval, DiscoveryReport, SelectionMethod, SelectionResult};

use super::config::{ScenarioConfig, SignalLaw, SignalSpec};
use super::methods::{run_method, MethodOptions, MethodOutput};
use super::scenario::{generate, Scenario};

/// Averages over all coordinates, the nonzero means and the zero means.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Split {
    pub all: Option<f64>,
    pub nonzero: Option<f64>,
    pub zero: Option<f64>,
}

/// Outcome of one method on one replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepRecord {
    pub rep: usize,
    pub method: String,
    pub tau: f64,
    pub coverage: Split,
    pub length: Split,
    pub interval_rule: DiscoveryReport,
    pub threshold_rule: DiscoveryReport,
    pub ball_covered: Option<bool>,
    pub ball_radius: Option<f64>,
    #[serde(skip)]
    pub runtime: Duration,
}

fn split_mean(values: impl Iterator<Item = (bool, f64)>) -> Split {
    let (mut all, mut nz, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for (nonzero, v) in values {
        all.push(v);
        if nonzero { nz.push(v) } else { z.push(v) }
    }
    Split {
        all: mean(all),
        nonzero: mean(nz),
        zero: mean(z),
    }
}

/// Mean of the sorted values, so the result does not depend on input order.
fn mean(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    Some(pairwise_sum(&xs) / xs.len() as f64)
}

/// Scores a method's output against the truth.
pub fn evaluate(out: &MethodOutput, sc: &Scenario, cutoff: f64, rep: usize) -> Result<RepRecord> {
    let n = sc.theta0.len();
    if out.intervals.len() != n {
        return Err(Error::LengthMismatch { left: n, right: out.intervals.len() });
    }
    let truth = || sc.theta0.iter().map(|&t| t != 0.0);
    let coverage = split_mean(truth().zip(out.intervals.iter().zip(&sc.theta0).map(|(iv, &t)| f64::from(iv.contains(t) as u8))));
    let length = split_mean(truth().zip(out.intervals.iter().map(|iv| iv.upper() - iv.lower())));
    let by_interval = select_by_interval(&out.intervals).with_method(if out.method.is_hierarchical() {
        SelectionMethod::IntervalHB
    } else {
        SelectionMethod::IntervalEB
    });
    let by_threshold = SelectionResult {
        selected: out.kappa.iter().map(|&k| k > cutoff).collect(),
        method: SelectionMethod::Threshold,
        params: crate::selection::SelectionParams {
            cutoff: Some(cutoff),
            ..Default::default()
        },
    };
    let (ball_covered, ball_radius) = match &out.ball {
        Some(b) => (Some(b.contains(&sc.theta0)?), Some(b.radius)),
        None => (None, None),
    };
    Ok(RepRecord {
        rep,
        method: out.method.to_string(),
        tau: out.tau,
        coverage,
        length,
        interval_rule: discovery_report(&by_interval, &sc.theta0, &sc.regions)?,
        threshold_rule: discovery_report(&by_threshold, &sc.theta0, &sc.regions)?,
        ball_covered,
        ball_radius,
        runtime: Duration::ZERO,
    })
}

/// Per-region averages.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RegionMeans {
    pub small: Option<f64>,
    pub medium: Option<f64>,
    pub large: Option<f64>,
    pub unclassified: Option<f64>,
}

impl RegionMeans {
    fn collect(reports: &[&DiscoveryReport], f: impl Fn(&DiscoveryReport, RegionLabel) -> Option<f64>) -> Self {
        let per = |r: RegionLabel| mean(reports.iter().filter_map(|d| f(d, r)).collect());
        RegionMeans {
            small: per(RegionLabel::Small),
            medium: per(RegionLabel::Medium),
            large: per(RegionLabel::Large),
            unclassified: per(RegionLabel::Unclassified),
        }
    }

    pub fn get(&self, r: RegionLabel) -> Option<f64> {
        match r {
            RegionLabel::Small => self.small,
            RegionLabel::Medium => self.medium,
            RegionLabel::Large => self.large,
            RegionLabel::Unclassified => self.unclassified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleSummary {
    pub fdr: f64,
    pub selected: f64,
    /// Mean number of selected nonzero means per region.
    pub true_discoveries: RegionMeans,
    /// Mean fraction of the nonzero means per region that were selected.
    pub detection: RegionMeans,
}

impl RuleSummary {
    fn collect(reports: &[&DiscoveryReport]) -> Self {
        RuleSummary {
            fdr: mean(reports.iter().map(|d| d.fdr).collect()).unwrap_or(0.0),
            selected: mean(reports.iter().map(|d| d.selected as f64).collect()).unwrap_or(0.0),
            true_discoveries: RegionMeans::collect(reports, |d, r| {
                (d.signals.get(r) > 0).then(|| d.true_discoveries.get(r) as f64)
            }),
            detection: RegionMeans::collect(reports, |d, r| d.detection_fraction(r)),
        }
    }
}

/// Replication averages for one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub reps: usize,
    pub coverage: Split,
    pub length: Split,
    pub mean_tau: f64,
    pub interval_rule: RuleSummary,
    pub threshold_rule: RuleSummary,
    pub ball_coverage: Option<f64>,
    pub ball_radius: Option<f64>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl MethodSummary {
    /// `(metric, value)` pairs in a fixed order, skipping undefined metrics.
    pub fn metrics(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        let mut push = |name: String, v: Option<f64>| {
            if let Some(v) = v {
                out.push((name, v));
            }
        };
        for (what, s) in [("coverage", &self.coverage), ("length", &self.length)] {
            push(format!("{what}_all"), s.all);
            push(format!("{what}_nonzero"), s.nonzero);
            push(format!("{what}_zero"), s.zero);
        }
        push("mean_tau".into(), Some(self.mean_tau));
        for (rule, s) in [("interval", &self.interval_rule), ("threshold", &self.threshold_rule)] {
            push(format!("fdr_{rule}"), Some(s.fdr));
            push(format!("selected_{rule}"), Some(s.selected));
            for r in RegionLabel::ALL {
                push(format!("true_discoveries_{rule}_{}", r.name()), s.true_discoveries.get(r));
            }
            for r in RegionLabel::ALL {
                push(format!("detection_{rule}_{}", r.name()), s.detection.get(r));
            }
        }
        push("ball_coverage".into(), self.ball_coverage);
        push("ball_radius".into(), self.ball_radius);
        out
    }
}

fn split_of(records: &[RepRecord], f: impl Fn(&RepRecord) -> Split) -> Split {
    Split {
        all: mean(records.iter().filter_map(|r| f(r).all).collect()),
        nonzero: mean(records.iter().filter_map(|r| f(r).nonzero).collect()),
        zero: mean(records.iter().filter_map(|r| f(r).zero).collect()),
    }
}

/// Averages the records of one method over replications.
pub fn aggregate(records: &[RepRecord]) -> Result<MethodSummary> {
    let first = records.first().ok_or_else(|| Error::config("nothing to aggregate"))?;
    if let Some(r) = records.iter().find(|r| r.method != first.method) {
        return Err(Error::config(format!("mixed methods `{}` and `{}`", first.method, r.method)));
    }
    let interval: Vec<&DiscoveryReport> = records.iter().map(|r| &r.interval_rule).collect();
    let threshold: Vec<&DiscoveryReport> = records.iter().map(|r| &r.threshold_rule).collect();
    Ok(MethodSummary {
        method: first.method.clone(),
        reps: records.len(),
        coverage: split_of(records, |r| r.coverage),
        length: split_of(records, |r| r.length),
        mean_tau: mean(records.iter().map(|r| r.tau).collect()).unwrap_or(f64::NAN),
        interval_rule: RuleSummary::collect(&interval),
        threshold_rule: RuleSummary::collect(&threshold),
        ball_coverage: mean(records.iter().filter_map(|r| r.ball_covered.map(|c| f64::from(c as u8))).collect()),
        ball_radius: mean(records.iter().filter_map(|r| r.ball_radius).collect()),
        runtime: records.iter().map(|r| r.runtime).sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub notes: Vec<String>,
    pub config: ScenarioConfig,
    pub methods: Vec<MethodSummary>,
}

impl RunReport {
    /// Tidy CSV with header `scenario,method,metric,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "scenario,method,metric,value")?;
        for m in &self.methods {
            for (metric, v) in m.metrics() {
                writeln!(w, "{},{},{},{}", self.scenario, m.method, metric, v)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn notes(cfg: &ScenarioConfig) -> Vec<String> {
    let mut notes = vec![format!("signal: {}", cfg.signal.describe())];
    if let SignalSpec::FromDistribution(SignalLaw::Gamma { .. }) = cfg.signal {
        notes.push("gamma signals are positive draws without a random sign".into());
    }
    notes
}

/// Runs every replication of a scenario and aggregates per method.
/// Replications run in parallel; the reduction is in replication order.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let per_rep = par::try_map_range(cfg.reps, |rep| -> Result<Vec<RepRecord>> {
        let sc = generate(cfg, rep)?;
        let rep_seed = rng::child_seed(cfg.seed, rep as u64);
        cfg.methods
            .iter()
            .enumerate()
            .map(|(k, &method)| {
                let opts = MethodOptions {
                    c1: cfg.c1,
                    c2: cfg.c2,
                    hb: cfg.hb,
                    ball_draws: cfg.ball_draws,
                    seed: rng::child_seed(rep_seed, 2 + k as u64),
                };
                let start = Instant::now();
                let out = run_method(&sc.y, method, cfg.alpha, cfg.blowup_l, &opts)?;
                let mut rec = evaluate(&out, &sc, cfg.cutoff, rep)?;
                rec.runtime = start.elapsed();
                Ok(rec)
            })
            .collect()
    })?;
    let methods = (0..cfg.methods.len())
        .map(|k| {
            let recs: Vec<RepRecord> = per_rep.iter().map(|v| v[k].clone()).collect();
            aggregate(&recs)
        })
        .collect::<Result<_>>()?;
    Ok(RunReport {
        scenario: cfg.name.clone(),
        notes: notes(cfg),
        config: cfg.clone(),
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::RegionCounts;

    fn record(rep: usize, tau: f64, cov: f64, fdr: f64) -> RepRecord {
        let d = DiscoveryReport {
            fdr,
            selected: 2,
            false_positives: 0,
            true_discoveries: RegionCounts { large: 1, ..Default::default() },
            signals: RegionCounts { large: 2, ..Default::default() },
        };
        RepRecord {
            rep,
            method: "eb-mmle".into(),
            tau,
            coverage: Split { all: Some(cov), nonzero: Some(cov), zero: None },
            length: Split::default(),
            interval_rule: d,
            threshold_rule: d,
            ball_covered: None,
            ball_radius: None,
            runtime: Duration::ZERO,
        }
    }

    #[test]
    fn single_rep_passthrough() {
        let s = aggregate(&[record(0, 0.2, 0.9, 0.1)]).unwrap();
        assert_eq!(s.mean_tau, 0.2);
        assert_eq!(s.coverage.all, Some(0.9));
        assert_eq!(s.coverage.zero, None);
        assert_eq!(s.interval_rule.detection.large, Some(0.5));
    }

    #[test]
    fn hand_computed_average() {
        let recs = [record(0, 0.1, 1.0, 0.0), record(1, 0.2, 0.5, 0.3), record(2, 0.6, 0.75, 0.0)];
        let s = aggregate(&recs).unwrap();
        assert!((s.mean_tau - 0.3).abs() < 1e-15);
        assert_eq!(s.coverage.all, Some(0.75));
        assert!((s.interval_rule.fdr - 0.1).abs() < 1e-15);
        let mut rev = recs.to_vec();
        rev.reverse();
        assert_eq!(aggregate(&rev).unwrap(), s);
        assert!(aggregate(&[]).is_err());
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchical::{DEFAULT_BURN_IN, DEFAULT_ITERS};
use crate::scale::GlobalScale;

/// Replications when neither `reps` nor `full_scale` is given.
pub const DESK_REPS: usize = 100;
pub const FULL_SCALE_REPS: usize = 500;

/// Distribution of the nonzero means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SignalLaw {
    Laplace { scale: f64 },
    /// Positive draws; no random sign is attached.
    Gamma { shape: f64, scale: f64 },
    Cauchy { scale: f64 },
}

impl SignalLaw {
    pub const LAPLACE: SignalLaw = SignalLaw::Laplace { scale: 3.0 };
    pub const GAMMA: SignalLaw = SignalLaw::Gamma { shape: 2.0, scale: 2.0 };
    pub const CAUCHY: SignalLaw = SignalLaw::Cauchy { scale: 5.0 };
}

/// How the first `p` coordinates of `theta0` are filled; the rest are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SignalSpec {
    FixedValue(f64),
    /// `N(A, 1)` draws.
    NormalAround(f64),
    /// Small (`1/n`), medium (`0.5 zeta(tau_n(p))`) and large
    /// (`1.5 sqrt(2 log n)`) means in the given counts.
    ThreeGroup { counts: [usize; 3] },
    FromDistribution(SignalLaw),
    /// Consecutive blocks of `(count, value)`.
    Groups(Vec<(usize, f64)>),
}

impl SignalSpec {
    /// Three groups of (nearly) equal size, any remainder going to the large group.
    pub fn three_group(p: usize) -> Self {
        let k = p / 3;
        SignalSpec::ThreeGroup { counts: [k, k, p - 2 * k] }
    }

    pub fn describe(&self) -> String {
        match self {
            SignalSpec::FixedValue(a) => format!("fixed value {a}"),
            SignalSpec::NormalAround(a) => format!("N({a}, 1)"),
            SignalSpec::ThreeGroup { counts } => format!("three groups {counts:?}"),
            SignalSpec::FromDistribution(law) => format!("{law:?}"),
            SignalSpec::Groups(g) => format!("groups {g:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MethodSpec {
    EbMmle,
    EbSimple,
    NormalApprox,
    HbCauchy,
    HbTruncCauchy,
    HbTruncUniform,
    Fixed(GlobalScale),
}

impl MethodSpec {
    /// The five methods of the coverage study.
    pub const COVERAGE_STUDY: [MethodSpec; 5] = [
        MethodSpec::EbSimple,
        MethodSpec::EbMmle,
        MethodSpec::NormalApprox,
        MethodSpec::HbCauchy,
        MethodSpec::HbTruncCauchy,
    ];

    pub fn is_hierarchical(self) -> bool {
        matches!(self, MethodSpec::HbCauchy | MethodSpec::HbTruncCauchy | MethodSpec::HbTruncUniform)
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::EbMmle => f.write_str("eb-mmle"),
            MethodSpec::EbSimple => f.write_str("eb-simple"),
            MethodSpec::NormalApprox => f.write_str("normal"),
            MethodSpec::HbCauchy => f.write_str("hb-cauchy"),
            MethodSpec::HbTruncCauchy => f.write_str("hb-tcauchy"),
            MethodSpec::HbTruncUniform => f.write_str("hb-tuniform"),
            MethodSpec::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eb-mmle" => MethodSpec::EbMmle,
            "eb-simple" => MethodSpec::EbSimple,
            "normal" => MethodSpec::NormalApprox,
            "hb-cauchy" => MethodSpec::HbCauchy,
            "hb-tcauchy" => MethodSpec::HbTruncCauchy,
            "hb-tuniform" => MethodSpec::HbTruncUniform,
            _ => match s.strip_prefix("fixed:") {
                Some(t) => {
                    let t: f64 = t.parse().map_err(|_| Error::config(format!("bad fixed tau in `{s}`")))?;
                    MethodSpec::Fixed(GlobalScale::new(t)?)
                }
                None => return Err(Error::config(format!("unknown method `{s}`"))),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HbSettings {
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for HbSettings {
    fn default() -> Self {
        HbSettings {
            iters: DEFAULT_ITERS,
            burn_in: DEFAULT_BURN_IN,
            thin: 1,
        }
    }
}

/// A simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub n: usize,
    pub p: usize,
    pub signal: SignalSpec,
    pub reps: usize,
    pub seed: u64,
    pub alpha: f64,
    pub blowup_l: f64,
    pub methods: Vec<MethodSpec>,
    pub hb: HbSettings,
    /// Monte Carlo draws for the credible ball; `None` skips the ball.
    pub ball_draws: Option<usize>,
    /// Cut-off of the thresholding rule.
    pub cutoff: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ScenarioConfig {
    pub fn new(name: impl Into<String>, n: usize, p: usize, signal: SignalSpec) -> Self {
        ScenarioConfig {
            name: name.into(),
            n,
            p,
            signal,
            reps: DESK_REPS,
            seed: 0,
            alpha: 0.05,
            blowup_l: 1.0,
            methods: MethodSpec::COVERAGE_STUDY.to_vec(),
            hb: HbSettings::default(),
            ball_draws: None,
            cutoff: 0.5,
            c1: 2.0,
            c2: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(format!("need n >= 2, got {}", self.n)));
        }
        if self.p > self.n {
            return Err(Error::config(format!("need p <= n, got p = {}, n = {}", self.p, self.n)));
        }
        if self.reps == 0 {
            return Err(Error::config("need reps >= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !(self.blowup_l > 0.0) {
            return Err(Error::config(format!("need 0 < alpha < 1 and L > 0, got {}, {}", self.alpha, self.blowup_l)));
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return Err(Error::config(format!("cutoff must lie in (0, 1), got {}", self.cutoff)));
        }
        if self.methods.is_empty() {
            return Err(Error::config("no methods given"));
        }
        if self.hb.iters <= self.hb.burn_in || self.hb.thin == 0 {
            return Err(Error::config("need hb_iters > hb_burn_in and hb_thin >= 1"));
        }
        match &self.signal {
            SignalSpec::ThreeGroup { counts } => {
                if counts.iter().sum::<usize>() != self.p {
                    return Err(Error::config(format!("group counts {counts:?} do not add up to p = {}", self.p)));
                }
                if self.p >= self.n {
                    return Err(Error::config("three-group signals need p < n"));
                }
            }
            SignalSpec::Groups(g) if g.iter().map(|c| c.0).sum::<usize>() != self.p => {
                return Err(Error::config(format!("group counts do not add up to p = {}", self.p)));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        raw.into_config()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SignalKind {
    Fixed,
    Normal,
    ThreeGroup,
    Laplace,
    Gamma,
    Cauchy,
    Groups,
}

/// On-disk schema: flat `key = value` pairs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    n: usize,
    p: usize,
    signal: SignalKind,
    /// Signal level `A` for `fixed` and `normal`.
    signal_value: Option<f64>,
    /// Alternatively `A = signal_c * sqrt(2 log n)`.
    signal_c: Option<f64>,
    group_counts: Option<Vec<usize>>,
    group_values: Option<Vec<f64>>,
    reps: Option<usize>,
    #[serde(default)]
    full_scale: bool,
    #[serde(default)]
    seed: u64,
    alpha: Option<f64>,
    blowup_l: Option<f64>,
    methods: Option<Vec<String>>,
    hb_iters: Option<usize>,
    hb_burn_in: Option<usize>,
    hb_thin: Option<usize>,
    ball_draws: Option<usize>,
    cutoff: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
}

impl RawConfig {
    fn level(&self) -> Result<f64> {
        match (self.signal_value, self.signal_c) {
            (Some(a), None) => Ok(a),
            (None, Some(c)) => Ok(c * (2.0 * (self.n as f64).ln()).sqrt()),
            _ => Err(Error::config("give exactly one of signal_value and signal_c")),
        }
    }

    fn into_config(self) -> Result<ScenarioConfig> {
        let signal = match self.signal {
            SignalKind::Fixed => SignalSpec::FixedValue(self.level()?),
            SignalKind::Normal => SignalSpec::NormalAround(self.level()?),
            SignalKind::ThreeGroup => match &self.group_counts {
                Some(c) if c.len() == 3 => SignalSpec::ThreeGroup { counts: [c[0], c[1], c[2]] },
                Some(_) => return Err(Error::config("three-group needs exactly three group_counts")),
                None => SignalSpec::three_group(self.p),
            },
            SignalKind::Laplace => SignalSpec::FromDistribution(SignalLaw::LAPLACE),
            SignalKind::Gamma => SignalSpec::FromDistribution(SignalLaw::GAMMA),
            SignalKind::Cauchy => SignalSpec::FromDistribution(SignalLaw::CAUCHY),
            SignalKind::Groups => match (&self.group_counts, &self.group_values) {
                (Some(c), Some(v)) if c.len() == v.len() => SignalSpec::Groups(c.iter().copied().zip(v.iter().copied()).collect()),
                _ => return Err(Error::config("groups need group_counts and group_values of equal length")),
            },
        };
        let mut cfg = ScenarioConfig::new(self.name.unwrap_or_else(|| "scenario".into()), self.n, self.p, signal);
        cfg.reps = self.reps.unwrap_or(if self.full_scale { FULL_SCALE_REPS } else { DESK_REPS });
        cfg.seed = self.seed;
        cfg.alpha = self.alpha.unwrap_or(cfg.alpha);
        cfg.blowup_l = self.blowup_l.unwrap_or(cfg.blowup_l);
        if let Some(m) = self.methods {
            cfg.methods = m.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        cfg.hb.iters = self.hb_iters.unwrap_or(cfg.hb.iters);
        cfg.hb.burn_in = self.hb_burn_in.unwrap_or(cfg.hb.burn_in);
        cfg.hb.thin = self.hb_thin.unwrap_or(cfg.hb.thin);
        cfg.ball_draws = self.ball_draws.filter(|&d| d > 0);
        cfg.cutoff = self.cutoff.unwrap_or(cfg.cutoff);
        cfg.c1 = self.c1.unwrap_or(cfg.c1);
        cfg.c2 = self.c2.unwrap_or(cfg.c2);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_toml() {
        let cfg = ScenarioConfig::from_toml(
            r#"
            name = "cov"
            n = 400
            p = 20
            signal = "normal"
            signal_c = 2.0
            reps = 3
            seed = 9
            methods = ["eb-mmle", "fixed:0.1"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.reps, 3);
        assert_eq!(cfg.methods[1], MethodSpec::Fixed(GlobalScale::new(0.1).unwrap()));
        match cfg.signal {
            SignalSpec::NormalAround(a) => assert!((a - 2.0 * (2.0 * 400f64.ln()).sqrt()).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ScenarioConfig::from_toml("n = 10\np = 11\nsignal = \"cauchy\"").is_err());
        assert!(ScenarioConfig::from_toml("n = 10\np = 1\nsignal = \"fixed\"").is_err());
        assert!(ScenarioConfig::from_toml("n = 10\np = 1\nsignal = \"cauchy\"\nreps = 0").is_err());
        assert!(ScenarioConfig::from_toml("n = 10\np = 1\nsignal = \"cauchy\"\nbogus = 1").is_err());
        assert!(ScenarioConfig::from_toml("n = 10\np = 1\nsignal = \"cauchy\"\nmethods = [\"nope\"]").is_err());
        let full = ScenarioConfig::from_toml("n = 10\np = 1\nsignal = \"cauchy\"\nfull_scale = true").unwrap();
        assert_eq!(full.reps, FULL_SCALE_REPS);
    }

    #[test]
    fn method_names_roundtrip() {
        for m in MethodSpec::COVERAGE_STUDY.iter().chain(&[MethodSpec::HbTruncUniform]) {
            assert_eq!(m.to_string().parse::<MethodSpec>().unwrap(), *m);
        }
    }
}

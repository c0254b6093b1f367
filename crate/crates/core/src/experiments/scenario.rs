use rand::Rng;
use rand_distr::{Cauchy, Distribution, Gamma, StandardNormal};

use crate::credible::{classify_regions_adaptive, RegionConstants, RegionLabel};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::scale::{tau_rate, zeta};

use super::config::{ScenarioConfig, SignalLaw, SignalSpec};

/// One simulated data set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub y: Vec<f64>,
    pub theta0: Vec<f64>,
    pub regions: Vec<RegionLabel>,
}

impl Scenario {
    pub fn nonzero(&self) -> usize {
        self.theta0.iter().filter(|&&t| t != 0.0).count()
    }
}

/// Medium and large values of the three-group signal.
pub fn three_group_levels(n: usize, p: usize) -> [f64; 3] {
    let nf = n as f64;
    [1.0 / nf, 0.5 * zeta(tau_rate(n, p)), 1.5 * (2.0 * nf.ln()).sqrt()]
}

fn draw_law(law: SignalLaw, rng: &mut StreamRng) -> Result<f64> {
    let bad = |e: &dyn std::fmt::Display| Error::config(format!("signal law {law:?}: {e}"));
    Ok(match law {
        SignalLaw::Laplace { scale } => {
            let mut u: f64 = rng.random::<f64>() - 0.5;
            while u == -0.5 {
                u = rng.random::<f64>() - 0.5;
            }
            -scale * u.signum() * (-2.0 * u.abs()).ln_1p()
        }
        SignalLaw::Gamma { shape, scale } => Gamma::new(shape, scale).map_err(|e| bad(&e))?.sample(rng),
        SignalLaw::Cauchy { scale } => Cauchy::new(0.0, scale).map_err(|e| bad(&e))?.sample(rng),
    })
}

/// Nonzero part of `theta0`, in coordinate order.
fn signal(cfg: &ScenarioConfig, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let (n, p) = (cfg.n, cfg.p);
    let mut out = Vec::with_capacity(p);
    match &cfg.signal {
        SignalSpec::FixedValue(a) => out.resize(p, *a),
        SignalSpec::NormalAround(a) => {
            for _ in 0..p {
                let z: f64 = rng.sample(StandardNormal);
                out.push(a + z);
            }
        }
        SignalSpec::ThreeGroup { counts } => {
            let levels = three_group_levels(n, p);
            for (&c, &v) in counts.iter().zip(&levels) {
                out.extend(std::iter::repeat_n(v, c));
            }
        }
        SignalSpec::FromDistribution(law) => {
            for _ in 0..p {
                out.push(draw_law(*law, rng)?);
            }
        }
        SignalSpec::Groups(groups) => {
            for &(c, v) in groups {
                out.extend(std::iter::repeat_n(v, c));
            }
        }
    }
    Ok(out)
}

/// Data set number `rep`: the first `p` means follow the signal spec, the rest
/// are zero, and `Y = theta0 + N(0, I)`. The signal and the noise come from
/// separate streams of the replication seed.
pub fn generate(cfg: &ScenarioConfig, rep: usize) -> Result<Scenario> {
    cfg.validate()?;
    let seed = rng::child_seed(cfg.seed, rep as u64);
    let mut theta0 = signal(cfg, &mut rng::stream(seed, 0))?;
    theta0.resize(cfg.n, 0.0);
    let mut noise = rng::stream(seed, 1);
    let y = theta0
        .iter()
        .map(|&t| {
            let z: f64 = noise.sample(StandardNormal);
            t + z
        })
        .collect();
    let regions = if cfg.p == 0 {
        vec![RegionLabel::Small; cfg.n]
    } else {
        classify_regions_adaptive(&theta0, cfg.p, &RegionConstants::default())?
    };
    Ok(Scenario { y, theta0, regions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let cfg = ScenarioConfig::new("t", 50, 5, SignalSpec::NormalAround(3.0));
        let a = generate(&cfg, 0).unwrap();
        assert_eq!(a, generate(&cfg, 0).unwrap());
        assert_ne!(a.y, generate(&cfg, 1).unwrap().y);
        assert_eq!(a.y.len(), 50);
        assert_eq!(a.nonzero(), 5);
    }

    #[test]
    fn no_signal_is_pure_noise() {
        let cfg = ScenarioConfig::new("t", 50, 0, SignalSpec::FixedValue(3.0));
        let s = generate(&cfg, 4).unwrap();
        assert!(s.theta0.iter().all(|&t| t == 0.0));
        let with = generate(&ScenarioConfig::new("t", 50, 2, SignalSpec::FixedValue(3.0)), 4).unwrap();
        assert_eq!(s.y[2..], with.y[2..]);
    }

    #[test]
    fn three_group_values() {
        let cfg = ScenarioConfig::new("t", 800, 120, SignalSpec::three_group(120));
        let s = generate(&cfg, 0).unwrap();
        let large = 1.5 * (2.0 * 800f64.ln()).sqrt();
        assert_eq!(s.theta0[0], 1.0 / 800.0);
        assert_eq!(s.theta0[119], large);
        assert_eq!(s.theta0.iter().filter(|&&t| t == large).count(), 40);
        assert!(s.regions[..40].iter().all(|&r| r == RegionLabel::Small));
        assert!(s.regions[40..80].iter().all(|&r| r == RegionLabel::Medium));
        assert!(s.regions[80..120].iter().all(|&r| r == RegionLabel::Large));
    }

    #[test]
    fn gamma_signals_positive() {
        let cfg = ScenarioConfig::new("t", 200, 100, SignalSpec::FromDistribution(SignalLaw::GAMMA));
        assert!(generate(&cfg, 0).unwrap().theta0[..100].iter().all(|&t| t > 0.0));
    }
}

//! Domain scalars: the global scale, sparsity rates and kernel orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The global shrinkage hyperparameter `tau`, restricted to `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GlobalScale(f64);

impl GlobalScale {
    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 && tau <= 1.0 {
            Ok(GlobalScale(tau))
        } else {
            Err(Error::domain(format!("global scale must lie in (0, 1], got {tau}")))
        }
    }

    /// Clamps into `[lo, 1]` before constructing; `lo` must be positive.
    pub fn clamped(tau: f64, lo: f64) -> Self {
        GlobalScale(tau.clamp(lo, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Detection threshold `sqrt(2 log(1/tau))`; zero at `tau = 1`.
    #[inline]
    pub fn zeta(self) -> f64 {
        zeta(self.0)
    }
}

impl TryFrom<f64> for GlobalScale {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        GlobalScale::new(v)
    }
}

impl From<GlobalScale> for f64 {
    fn from(s: GlobalScale) -> f64 {
        s.0
    }
}

impl std::fmt::Display for GlobalScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// `sqrt(2 log(1/t))` for `0 < t <= 1`.
#[inline]
pub fn zeta(t: f64) -> f64 {
    (2.0 * (1.0 / t).ln()).max(0.0).sqrt()
}

/// A global scale on `(0, inf)`.
///
/// Only hierarchical chains under an untruncated half-Cauchy hyperprior
/// produce these; every other code path works with [`GlobalScale`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct UnboundedScale(f64);

impl UnboundedScale {
    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 {
            Ok(UnboundedScale(tau))
        } else {
            Err(Error::domain(format!("scale must be positive, got {tau}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Narrows to a [`GlobalScale`] when the value lies in `(0, 1]`.
    pub fn bounded(self) -> Option<GlobalScale> {
        GlobalScale::new(self.0).ok()
    }
}

/// Problem dimension `n` together with an assumed number of signals `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityRate {
    n: usize,
    p: usize,
}

impl SparsityRate {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p >= 1 && p <= n {
            Ok(SparsityRate { n, p })
        } else {
            Err(Error::domain(format!("need 1 <= p <= n, got n={n}, p={p}")))
        }
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn p(self) -> usize {
        self.p
    }

    /// `(p/n) sqrt(log(n/p))`, the near-optimal order of the global scale.
    pub fn tau(self) -> f64 {
        tau_rate(self.n, self.p)
    }
}

/// `(p/n) sqrt(log(n/p))`.
pub fn tau_rate(n: usize, p: usize) -> f64 {
    let ratio = n as f64 / p as f64;
    (p as f64 / n as f64) * ratio.ln().sqrt()
}

/// Half-integer orders of the shrinkage integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelOrder {
    MinusHalf,
    Half,
    ThreeHalves,
    FiveHalves,
    SevenHalves,
}

impl KernelOrder {
    pub const ALL: [KernelOrder; 5] = [
        KernelOrder::MinusHalf,
        KernelOrder::Half,
        KernelOrder::ThreeHalves,
        KernelOrder::FiveHalves,
        KernelOrder::SevenHalves,
    ];

    pub fn value(self) -> f64 {
        self.index() as f64 - 0.5
    }

    /// Position in [`KernelOrder::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_value(k: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.value() == k)
            .ok_or_else(|| Error::domain(format!("unsupported kernel order {k}")))
    }

    /// The next order up, `k + 1`.
    pub fn succ(self) -> Option<Self> {
        Self::ALL.get(self.index() + 1).copied()
    }
}

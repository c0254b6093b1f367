// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod credible;
pub mod error;
pub mod experiments;
pub mod hierarchical;
pub mod kernels;
pub mod numeric;
pub mod par;
pub mod posterior;
pub mod rng;
pub mod scale;
pub mod selection;
pub mod tau;

pub use credible::{CredibleBall, CredibleInterval, RegionLabel};
pub use error::{Error, Result};
pub use posterior::{CoordinatePosterior, ShrinkWeightLaw};
pub use scale::{GlobalScale, KernelOrder, SparsityRate, UnboundedScale};
pub use tau::{TauEstimate, TauMethod};

//! Hoeffding sample-size planning and per-subset seed derivation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AttrSet;

/// Number of samples used when a sampled plan gives no count.
pub const DEFAULT_SAMPLES: usize = 1000;

// slack for ceil() so that e.g. 2.0000000000000004 counts as 2
fn ceil_tolerant(x: f64) -> u64 {
    (x - 1e-12 * x.abs().max(1.0)).ceil().max(0.0) as u64
}

fn check_accuracy(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Samples needed to estimate utility to absolute error `epsilon` with
/// confidence `1 - delta`: `ceil(1/2 (log2(n_intents) / epsilon)^2 ln(1/delta))`.
pub fn sample_size_utility(epsilon: f64, delta: f64, n_intents: usize) -> Result<u64> {
    check_accuracy(epsilon, delta)?;
    if n_intents < 2 {
        return Err(Error::InvalidArgument(format!("n_intents must be >= 2, got {n_intents}")));
    }
    let range = (n_intents as f64).log2() / epsilon;
    Ok(ceil_tolerant(0.5 * range * range * (1.0 / delta).ln()))
}

/// Samples needed to estimate a loss bounded in `[0, 1]` to absolute error
/// `epsilon` with confidence `1 - delta`: `ceil(ln(1/delta) / (2 epsilon^2))`.
pub fn sample_size_cost(epsilon: f64, delta: f64) -> Result<u64> {
    check_accuracy(epsilon, delta)?;
    Ok(ceil_tolerant((1.0 / delta).ln() / (2.0 * epsilon * epsilon)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleCount {
    Fixed(usize),
    Accuracy { epsilon: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub count: SampleCount,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn fixed(n_samples: usize, seed: u64) -> Self {
        SamplingPlan {
            count: SampleCount::Fixed(n_samples),
            seed,
        }
    }

    pub fn accuracy(epsilon: f64, delta: f64, seed: u64) -> Self {
        SamplingPlan {
            count: SampleCount::Accuracy { epsilon, delta },
            seed,
        }
    }

    /// Sample count for a log whose largest per-query intent domain is `n_intents`.
    /// An accuracy target takes the larger of the utility and cost requirements.
    pub fn resolve(&self, n_intents: usize) -> Result<usize> {
        match self.count {
            SampleCount::Fixed(0) => Err(Error::InvalidArgument("n_samples must be >= 1".into())),
            SampleCount::Fixed(n) => Ok(n),
            SampleCount::Accuracy { epsilon, delta } => {
                let u = sample_size_utility(epsilon, delta, n_intents.max(2))?;
                let c = sample_size_cost(epsilon, delta)?;
                Ok(u.max(c).max(1) as usize)
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sampling the evaluation of `set`; re-evaluating a subset always
/// draws the same rows.
pub fn subset_seed(master: u64, set: AttrSet) -> u64 {
    splitmix64(master ^ splitmix64(set.bits()))
}

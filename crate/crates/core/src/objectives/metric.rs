use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Largest max-probability fed to the rescaled loss, `1 - 2^-30`; caps the loss at 30 bits.
pub const RESCALED_CLIP: f64 = 1.0 - 1.0 / (1u64 << 30) as f64;

/// Identifiability loss applied to the conditional user distribution `P(Y | A = a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMetric {
    /// `max_y P(y)`: the chance an adversary guessing the most likely user is right.
    MaxProb,
    /// `-log2(1 - max_y P(y))`, punishing near-certainty much harder.
    Rescaled,
    /// 1 when fewer than `k` users remain possible, else 0.
    KAnonymity { k: usize },
}

impl CostMetric {
    pub fn kanon(k: usize) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::InvalidArgument("k-anonymity needs k >= 1".into()));
        }
        Ok(CostMetric::KAnonymity { k })
    }

    /// Loss of a conditional distribution with largest probability `max_prob`
    /// and `support` users of nonzero probability.
    pub fn loss(&self, max_prob: f64, support: usize) -> f64 {
        match *self {
            CostMetric::MaxProb => max_prob,
            CostMetric::Rescaled => -(1.0 - max_prob.min(RESCALED_CLIP)).log2(),
            CostMetric::KAnonymity { k } => {
                if support < k {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper end of the loss range.
    pub fn max_loss(&self) -> f64 {
        match self {
            CostMetric::Rescaled => -(1.0 - RESCALED_CLIP).log2(),
            _ => 1.0,
        }
    }
}

impl fmt::Display for CostMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostMetric::MaxProb => f.write_str("maxprob"),
            CostMetric::Rescaled => f.write_str("rescaled"),
            CostMetric::KAnonymity { k } => write!(f, "kanon:{k}"),
        }
    }
}

impl FromStr for CostMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "maxprob" => Ok(CostMetric::MaxProb),
            "rescaled" => Ok(CostMetric::Rescaled),
            other => match other.strip_prefix("kanon:") {
                Some(k) => {
                    let k = k
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad k in `{other}`")))?;
                    CostMetric::kanon(k)
                }
                None => Err(Error::InvalidArgument(format!(
                    "unknown metric `{other}` (expected maxprob, rescaled or kanon:K)"
                ))),
            },
        }
    }
}

impl Serialize for CostMetric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CostMetric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for text in ["maxprob", "rescaled", "kanon:100"] {
            assert_eq!(text.parse::<CostMetric>().unwrap().to_string(), text);
        }
        assert!("kanon:0".parse::<CostMetric>().is_err());
        assert!("kanon:x".parse::<CostMetric>().is_err());
        assert!("entropy".parse::<CostMetric>().is_err());
    }

    #[test]
    fn losses() {
        assert_eq!(CostMetric::MaxProb.loss(0.25, 4), 0.25);
        assert_eq!(CostMetric::Rescaled.loss(0.5, 2), 1.0);
        assert!((CostMetric::Rescaled.loss(1.0, 1) - 30.0).abs() < 1e-6);
        let k = CostMetric::kanon(2).unwrap();
        assert_eq!(k.loss(1.0, 1), 1.0);
        assert_eq!(k.loss(0.5, 2), 0.0);
        assert_eq!(CostMetric::kanon(1).unwrap().loss(1.0, 1), 0.0);
    }
}

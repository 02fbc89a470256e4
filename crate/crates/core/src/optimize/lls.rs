//! Lazy local search for maximizing non-monotone submodular set functions.

use serde::{Deserialize, Serialize};

use super::lazy::LazyQueue;
use super::setfn::{Counted, SetFunction};
use crate::error::{Error, Result};
use crate::model::AttrSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlsConfig {
    /// A move must improve `F(A)` by more than the factor `1 + epsilon / n^2`.
    pub epsilon: f64,
    /// Cap on rounds of one upward and one downward pass; `None` means `2n`.
    pub max_passes: Option<usize>,
}

impl Default for LlsConfig {
    fn default() -> Self {
        LlsConfig {
            epsilon: 0.01,
            max_passes: None,
        }
    }
}

impl LlsConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        let config = LlsConfig {
            epsilon,
            max_passes: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.max_passes == Some(0) {
            return Err(Error::InvalidArgument("max_passes must be >= 1".into()));
        }
        Ok(())
    }

    pub fn pass_limit(&self, n: usize) -> usize {
        self.max_passes.unwrap_or(2 * n).max(1)
    }
}

/// Result of a search over a plain set function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub chosen: AttrSet,
    pub value: f64,
    /// Rounds of upward plus downward passes.
    pub passes: usize,
    pub eval_count: usize,
    /// False when the pass cap stopped the search; `chosen` is then the best found.
    pub converged: bool,
}

/// Smallest admissible improvement of a move away from `A` with value `fa`.
/// Positive values use the multiplicative factor; otherwise the step is
/// measured against the best singleton.
fn required_gain(fa: f64, step: f64, singleton: f64) -> f64 {
    if fa > 0.0 {
        step * fa
    } else {
        step * singleton.abs()
    }
}

/// Runs lazy local search: start at the best singleton, alternate lazy greedy
/// upward and downward passes while a move beats the improvement threshold,
/// then return the better of the local optimum and its complement.
pub fn lls_search<F: SetFunction>(f: F, config: &LlsConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let universe = f.universe();
    let n = universe.len();
    if n == 0 {
        return Err(Error::InvalidArgument("local search needs at least one candidate".into()));
    }
    let f = Counted::new(f);
    let step = config.epsilon / (n * n) as f64;
    let limit = config.pass_limit(n);

    let mut best: Option<(usize, f64)> = None;
    for v in universe.iter() {
        let value = f.value(AttrSet::singleton(v));
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((v, value));
        }
    }
    let (first, singleton) = best.expect("nonempty universe");
    let mut chosen = AttrSet::singleton(first);
    let mut fa = singleton;
    let mut passes = 0;
    let mut converged = true;

    loop {
        if passes >= limit {
            converged = false;
            break;
        }
        passes += 1;
        let outside = universe.difference(chosen);
        let mut queue = LazyQueue::fresh(
            outside
                .iter()
                .map(|v| (v, f.value(chosen.with(v)) - fa))
                .collect::<Vec<_>>(),
        );
        while !queue.is_empty() {
            let (cur, base) = (chosen, fa);
            let (v, gain) = queue.pop_best(|v| f.value(cur.with(v)) - base).expect("nonempty");
            if gain > required_gain(fa, step, singleton) {
                chosen.insert(v);
                fa += gain;
                queue.invalidate();
            } else {
                break;
            }
        }

        let mut changed = false;
        let mut queue = LazyQueue::fresh(
            chosen
                .iter()
                .map(|v| (v, f.value(chosen.without(v)) - fa))
                .collect::<Vec<_>>(),
        );
        while !queue.is_empty() {
            let (cur, base) = (chosen, fa);
            let (v, gain) = queue.pop_best(|v| f.value(cur.without(v)) - base).expect("nonempty");
            if gain > required_gain(fa, step, singleton) {
                chosen.remove(v);
                fa += gain;
                changed = true;
                queue.invalidate();
            } else {
                break;
            }
        }
        if !changed {
            break;
        }
    }

    // re-evaluate rather than trust the accumulated gains
    let value = f.value(chosen);
    let complement = universe.difference(chosen);
    let complement_value = f.value(complement);
    let (chosen, value) = if complement_value > value {
        (complement, complement_value)
    } else {
        (chosen, value)
    };
    Ok(SearchOutcome {
        chosen,
        value,
        passes,
        eval_count: f.calls(),
        converged,
    })
}

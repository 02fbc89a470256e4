use serde::{Deserialize, Serialize};

use super::lazy::LazyQueue;
use super::setfn::{Counted, SetFunction};
use crate::error::{Error, Result};
use crate::model::AttrSet;

/// Order in which greedy added attributes and the function value after each addition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub order: Vec<usize>,
    pub incremental_values: Vec<f64>,
    /// Candidate evaluations `f(A + v)`; the `f(empty)` baseline is not counted.
    pub eval_count: usize,
}

impl GreedyTrace {
    pub fn set_after(&self, steps: usize) -> AttrSet {
        AttrSet::from_indices(self.order[..steps].iter().copied())
    }
}

fn check_k(universe: AttrSet, k: usize) -> Result<()> {
    if k > universe.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the {} candidate attributes",
            universe.len()
        )));
    }
    Ok(())
}

/// Adds, `k` times, the element with the largest increase of `sign * f`
/// (lowest index on ties). Never stops early.
pub fn greedy_search<F: SetFunction>(f: F, sign: f64, k: usize) -> Result<GreedyTrace> {
    let universe = f.universe();
    check_k(universe, k)?;
    let f = Counted::new(f);
    let mut trace = GreedyTrace {
        order: Vec::with_capacity(k),
        incremental_values: Vec::with_capacity(k),
        eval_count: 0,
    };
    if k == 0 {
        return Ok(trace);
    }
    let mut chosen = AttrSet::empty();
    let mut base = sign * f.inner.value(chosen);
    for _ in 0..k {
        let mut best: Option<(usize, f64, f64)> = None;
        for v in universe.difference(chosen).iter() {
            let value = f.value(chosen.with(v));
            let gain = sign * value - base;
            if best.is_none_or(|(_, g, _)| gain > g) {
                best = Some((v, gain, value));
            }
        }
        let (v, _, value) = best.expect("k <= universe size");
        chosen.insert(v);
        base = sign * value;
        trace.order.push(v);
        trace.incremental_values.push(value);
    }
    trace.eval_count = f.calls();
    Ok(trace)
}

/// Same result as [`greedy_search`] when `sign * f` is submodular, reusing
/// stale gains as upper bounds.
pub fn lazy_greedy_search<F: SetFunction>(f: F, sign: f64, k: usize) -> Result<GreedyTrace> {
    let universe = f.universe();
    check_k(universe, k)?;
    let f = Counted::new(f);
    let mut trace = GreedyTrace {
        order: Vec::with_capacity(k),
        incremental_values: Vec::with_capacity(k),
        eval_count: 0,
    };
    if k == 0 {
        return Ok(trace);
    }
    let mut chosen = AttrSet::empty();
    let mut base = sign * f.inner.value(chosen);
    let mut queue = LazyQueue::new(universe.iter());
    for _ in 0..k {
        let mut values = std::collections::HashMap::new();
        let (v, gain) = queue
            .pop_best(|v| {
                let value = f.value(chosen.with(v));
                values.insert(v, value);
                sign * value - base
            })
            .expect("k <= universe size");
        let value = values[&v];
        debug_assert!(gain.is_finite());
        chosen.insert(v);
        base = sign * value;
        queue.invalidate();
        trace.order.push(v);
        trace.incremental_values.push(value);
    }
    trace.eval_count = f.calls();
    Ok(trace)
}

use super::lls::SearchOutcome;
use super::setfn::{Counted, SetFunction};
use crate::error::{Error, Result};
use crate::model::AttrSet;

/// Default cap on the universe size for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 20;

/// Whether `value` beats the incumbent by more than rounding noise.
pub(crate) fn improves(value: f64, best: f64) -> bool {
    value > best + 1e-12 * best.abs().max(1.0)
}

/// Subsets of `universe` in canonical order: by size, then lexicographically.
pub fn canonical_subsets(universe: AttrSet) -> Vec<AttrSet> {
    let mut sets: Vec<AttrSet> = universe.subsets().collect();
    sets.sort_by(|a, b| a.canonical_cmp(*b));
    sets
}

/// Maximizes `f` over every subset of its universe. Among values equal up to
/// rounding the first set in canonical order wins.
pub fn exhaustive_search<F: SetFunction>(f: F, limit: usize) -> Result<SearchOutcome> {
    exhaustive_filtered(f, limit, |_| true)
}

/// Like [`exhaustive_search`], restricted to sets accepted by `feasible`.
/// `converged` is false when no set is feasible.
pub(crate) fn exhaustive_filtered<F: SetFunction>(
    f: F,
    limit: usize,
    mut feasible: impl FnMut(AttrSet) -> bool,
) -> Result<SearchOutcome> {
    let universe = f.universe();
    if universe.len() > limit {
        return Err(Error::UniverseTooLarge {
            size: universe.len(),
            limit,
        });
    }
    let f = Counted::new(f);
    let mut best: Option<(AttrSet, f64)> = None;
    for set in canonical_subsets(universe) {
        if !feasible(set) {
            continue;
        }
        let value = f.value(set);
        if best.is_none_or(|(_, b)| improves(value, b)) {
            best = Some((set, value));
        }
    }
    let converged = best.is_some();
    let (chosen, value) = best.unwrap_or((AttrSet::empty(), f64::NEG_INFINITY));
    Ok(SearchOutcome {
        chosen,
        value,
        passes: 0,
        eval_count: f.calls(),
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::setfn::from_fn;

    #[test]
    fn modular_optimum() {
        let w = [1.0, 2.0, -1.0];
        let f = from_fn(AttrSet::full(3), |s: AttrSet| s.iter().map(|i| w[i]).sum());
        let out = exhaustive_search(f, 20).unwrap();
        assert_eq!(out.chosen, AttrSet::from_indices([0, 1]));
        assert_eq!(out.value, 3.0);
        assert_eq!(out.eval_count, 8);
    }

    #[test]
    fn ties_prefer_small_then_low_index() {
        let f = from_fn(AttrSet::full(3), |s: AttrSet| if s.is_empty() { 0.0 } else { 1.0 });
        assert_eq!(exhaustive_search(f, 20).unwrap().chosen, AttrSet::singleton(0));
    }

    #[test]
    fn universe_limit() {
        let f = from_fn(AttrSet::full(5), |_| 0.0);
        assert!(matches!(
            exhaustive_search(f, 4),
            Err(Error::UniverseTooLarge { size: 5, limit: 4 })
        ));
    }
}

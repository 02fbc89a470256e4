//! Priority queue of stale marginal gains for lazy evaluation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy)]
struct Entry {
    gain: f64,
    idx: usize,
    stamp: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // larger gain first, then lower index
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Gains are upper bounds until refreshed in the current round.
#[derive(Debug, Default)]
pub(crate) struct LazyQueue {
    heap: BinaryHeap<Entry>,
    stamp: u64,
}

fn near(bound: f64, gain: f64) -> bool {
    bound >= gain - 1e-12 * (1.0 + gain.abs())
}

impl LazyQueue {
    /// Queue holding `items` with unknown (infinite) bounds.
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let heap = items
            .into_iter()
            .map(|idx| Entry {
                gain: f64::INFINITY,
                idx,
                stamp: 0,
            })
            .collect();
        LazyQueue { heap, stamp: 1 }
    }

    /// Marks every stored gain stale.
    pub fn invalidate(&mut self) {
        self.stamp += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Queue whose gains are all current.
    pub fn fresh(items: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let heap = items
            .into_iter()
            .map(|(idx, gain)| Entry { gain, idx, stamp: 1 })
            .collect();
        LazyQueue { heap, stamp: 1 }
    }

    /// Removes and returns the item with the largest current gain (lowest index
    /// on ties), refreshing stale bounds with `gain_of` only as needed. Stale
    /// bounds within rounding of the winner are refreshed too, so the result
    /// matches a full scan whenever stale bounds are true upper bounds.
    pub fn pop_best(&mut self, mut gain_of: impl FnMut(usize) -> f64) -> Option<(usize, f64)> {
        loop {
            let top = self.heap.pop()?;
            if top.stamp != self.stamp {
                self.heap.push(Entry {
                    gain: gain_of(top.idx),
                    idx: top.idx,
                    stamp: self.stamp,
                });
                continue;
            }
            let mut refreshed = false;
            while let Some(next) = self.heap.peek().copied() {
                if next.stamp == self.stamp || !near(next.gain, top.gain) {
                    break;
                }
                self.heap.pop();
                self.heap.push(Entry {
                    gain: gain_of(next.idx),
                    idx: next.idx,
                    stamp: self.stamp,
                });
                refreshed = true;
            }
            if refreshed {
                if let Some(next) = self.heap.peek() {
                    if next.stamp == self.stamp && *next > top {
                        self.heap.push(top);
                        continue;
                    }
                }
            }
            return Some((top.idx, top.gain));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_each_once_when_fresh_wins() {
        let mut q = LazyQueue::new(0..3);
        let gains = [1.0, 3.0, 2.0];
        let mut calls = 0;
        let best = q.pop_best(|i| {
            calls += 1;
            gains[i]
        });
        assert_eq!(best, Some((1, 3.0)));
        assert_eq!(calls, 3);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let mut q = LazyQueue::fresh([(2, 1.0), (0, 1.0), (1, 0.5)]);
        assert_eq!(q.pop_best(|_| unreachable!()), Some((0, 1.0)));
        assert_eq!(q.pop_best(|_| unreachable!()), Some((2, 1.0)));
    }

    #[test]
    fn stale_bounds_skip_evaluations() {
        let mut q = LazyQueue::fresh([(0, 5.0), (1, 4.0), (2, 1.0)]);
        q.invalidate();
        let gains = [3.0, 2.0, 0.5];
        let mut calls = Vec::new();
        let best = q.pop_best(|i| {
            calls.push(i);
            gains[i]
        });
        assert_eq!(best, Some((0, 3.0)));
        // item 2's bound of 1.0 is below 3.0 and never refreshed
        assert_eq!(calls, vec![0, 1]);
    }
}

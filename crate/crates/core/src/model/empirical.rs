//! Smoothed conditional distributions read directly off an event log.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::log::EventLog;
use crate::error::{Error, Result};

/// Dirichlet pseudocount added to every outcome cell of a conditional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub pseudocount: f64,
}

impl SmoothingConfig {
    pub const DEFAULT_PSEUDOCOUNT: f64 = 0.1;

    pub fn new(pseudocount: f64) -> Result<Self> {
        if !(pseudocount >= 0.0) || !pseudocount.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pseudocount must be a finite nonnegative number, got {pseudocount}"
            )));
        }
        Ok(SmoothingConfig { pseudocount })
    }

    /// Maximum-likelihood estimates.
    pub const fn none() -> Self {
        SmoothingConfig { pseudocount: 0.0 }
    }

    /// `(count + a) / (total + a * domain)`; uniform when nothing matched and `a = 0`.
    pub fn probability(&self, count: u64, total: u64, domain: usize) -> f64 {
        let a = self.pseudocount;
        if total == 0 && a == 0.0 {
            return 1.0 / domain as f64;
        }
        (count as f64 + a) / (total as f64 + a * domain as f64)
    }
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            pseudocount: Self::DEFAULT_PSEUDOCOUNT,
        }
    }
}

/// Conditional-distribution provider over the empirical distribution of a log.
///
/// The intent domain of a query is the set of intents observed for it; the
/// user domain is every user in the log.
#[derive(Debug)]
pub struct EmpiricalJoint<'a> {
    log: &'a EventLog,
    smoothing: SmoothingConfig,
    intents: BTreeMap<u32, Vec<u32>>,
    users: Vec<u64>,
}

pub fn empirical_joint(log: &EventLog, smoothing: SmoothingConfig) -> EmpiricalJoint<'_> {
    let mut intents: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut users = BTreeSet::new();
    for r in log.records() {
        intents.entry(r.query).or_default().insert(r.intent);
        users.insert(r.user);
    }
    EmpiricalJoint {
        log,
        smoothing,
        intents: intents
            .into_iter()
            .map(|(q, s)| (q, s.into_iter().collect()))
            .collect(),
        users: users.into_iter().collect(),
    }
}

impl<'a> EmpiricalJoint<'a> {
    pub fn intent_domain(&self, query: u32) -> Option<&[u32]> {
        self.intents.get(&query).map(Vec::as_slice)
    }

    pub fn users(&self) -> &[u64] {
        &self.users
    }

    fn matches(values: &[u32], pattern: &[(usize, u32)]) -> bool {
        pattern.iter().all(|&(i, v)| values[i] == v)
    }

    /// Smoothed `P(X | Q = query, A = pattern)` over the query's intent domain.
    pub fn intent_distribution(&self, query: u32, pattern: &[(usize, u32)]) -> Result<Vec<(u32, f64)>> {
        let domain = self
            .intent_domain(query)
            .ok_or_else(|| Error::InvalidArgument(format!("query {query} does not occur in the log")))?;
        let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
        let mut total = 0;
        for &row in self.log.rows_for_query(query) {
            let r = &self.log.records()[row];
            if Self::matches(&r.values, pattern) {
                *counts.entry(r.intent).or_default() += 1;
                total += 1;
            }
        }
        Ok(domain
            .iter()
            .map(|x| {
                let c = counts.get(x).copied().unwrap_or(0);
                (*x, self.smoothing.probability(c, total, domain.len()))
            })
            .collect())
    }

    /// Smoothed `P(Y | A = pattern)` over all users of the log.
    pub fn user_distribution(&self, pattern: &[(usize, u32)]) -> Vec<(u64, f64)> {
        let (counts, total) = self.user_counts(pattern);
        self.users
            .iter()
            .map(|u| {
                let c = counts.get(u).copied().unwrap_or(0);
                (*u, self.smoothing.probability(c, total, self.users.len()))
            })
            .collect()
    }

    /// Users with at least one matching row (unsmoothed support).
    pub fn user_support(&self, pattern: &[(usize, u32)]) -> usize {
        self.user_counts(pattern).0.len()
    }

    fn user_counts(&self, pattern: &[(usize, u32)]) -> (BTreeMap<u64, u64>, u64) {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total = 0;
        for r in self.log.records() {
            if Self::matches(&r.values, pattern) {
                *counts.entry(r.user).or_default() += 1;
                total += 1;
            }
        }
        (counts, total)
    }
}

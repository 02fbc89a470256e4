//! Greedy orderings, lazy local search, exhaustive search, online bounds,
//! lambda sweeps and the budget-constrained variant.

mod exhaustive;
mod greedy;
mod lazy;
mod lls;
mod setfn;
mod tradeoff;

pub use exhaustive::{canonical_subsets, exhaustive_search, DEFAULT_EXHAUSTIVE_LIMIT};
pub use greedy::{greedy_search, lazy_greedy_search, GreedyTrace};
pub use lls::{lls_search, LlsConfig, SearchOutcome};
pub use setfn::{from_fn, normalize_objective, FnSetFunction, KindFunction, NormalizedObjective, ObjectiveKind, SetFunction};
pub use tradeoff::{
    constrained_max_utility, online_bound, sweep_lambda, ConstrainedSelection, CurvePoint, TradeoffCurve,
    CONSTRAINED_ITERATIONS, CURVE_HEADER,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AttrSet;
use crate::objectives::{Evaluation, Objective};

/// An attribute subset together with its evaluation and search diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub chosen: AttrSet,
    /// Names of the chosen attributes in schema order.
    pub attrs: Vec<String>,
    pub evaluation: Evaluation,
    pub upper_bound: Option<f64>,
    pub passes: usize,
    /// Objective evaluations performed by the search.
    pub eval_count: usize,
}

impl Selection {
    pub fn from_set(objective: &Objective, chosen: AttrSet, passes: usize, eval_count: usize) -> Result<Self> {
        Ok(Selection {
            chosen,
            attrs: objective.schema().names(chosen),
            evaluation: objective.evaluate(chosen)?,
            upper_bound: None,
            passes,
            eval_count,
        })
    }

    fn from_outcome(objective: &Objective, out: &SearchOutcome) -> Result<Self> {
        Self::from_set(objective, out.chosen, out.passes, out.eval_count)
    }
}

/// Optimizer used to pick a set for `F_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Best prefix of the greedy ordering on `F_lambda`.
    Greedy,
    /// As `Greedy`, with lazy gain updates.
    Lazy,
    Lls,
    Exhaustive,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Lazy => "lazy",
            Algorithm::Lls => "lls",
            Algorithm::Exhaustive => "exhaustive",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Algorithm::Greedy),
            "lazy" => Ok(Algorithm::Lazy),
            "lls" => Ok(Algorithm::Lls),
            "exhaustive" => Ok(Algorithm::Exhaustive),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm `{other}` (expected greedy, lazy, lls or exhaustive)"
            ))),
        }
    }
}

/// Settings shared by the optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub lls: LlsConfig,
    pub exhaustive_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            algorithm: Algorithm::Lls,
            lls: LlsConfig::default(),
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
        }
    }
}

impl SolveOptions {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        SolveOptions {
            algorithm,
            ..Default::default()
        }
    }
}

/// Greedy ordering of the candidates by `kind`; `k` steps.
pub fn greedy(objective: &Objective, kind: ObjectiveKind, k: usize) -> Result<GreedyTrace> {
    greedy_search(KindFunction::new(objective, kind), kind.sign(), k)
}

pub fn lazy_greedy(objective: &Objective, kind: ObjectiveKind, k: usize) -> Result<GreedyTrace> {
    lazy_greedy_search(KindFunction::new(objective, kind), kind.sign(), k)
}

/// Lazy local search on `F_lambda`. Hitting the pass cap is an error carrying
/// the best selection found.
pub fn lls(objective: &Objective, config: &LlsConfig) -> Result<Selection> {
    let out = lls_search(objective, config)?;
    let selection = Selection::from_outcome(objective, &out)?;
    if !out.converged {
        return Err(Error::PassLimit {
            max_passes: config.pass_limit(objective.candidates().len()),
            best: Box::new(selection),
        });
    }
    Ok(selection)
}

/// Exact maximizer of `F_lambda` over all subsets of the candidates.
pub fn exhaustive(objective: &Objective, limit: usize) -> Result<Selection> {
    let out = exhaustive_search(objective, limit)?;
    Selection::from_outcome(objective, &out)
}

fn best_greedy_prefix(objective: &Objective, lazy: bool) -> Result<Selection> {
    let n = objective.candidates().len();
    let trace = if lazy {
        lazy_greedy(objective, ObjectiveKind::Full, n)?
    } else {
        greedy(objective, ObjectiveKind::Full, n)?
    };
    let mut best = (0, objective.evaluate(AttrSet::empty())?.objective);
    for (i, &value) in trace.incremental_values.iter().enumerate() {
        if exhaustive::improves(value, best.1) {
            best = (i + 1, value);
        }
    }
    Selection::from_set(objective, trace.set_after(best.0), 0, trace.eval_count + 1)
}

/// Runs the configured optimizer on `F_lambda`.
pub fn solve(objective: &Objective, options: &SolveOptions) -> Result<Selection> {
    match options.algorithm {
        Algorithm::Greedy => best_greedy_prefix(objective, false),
        Algorithm::Lazy => best_greedy_prefix(objective, true),
        Algorithm::Lls => lls(objective, &options.lls),
        Algorithm::Exhaustive => exhaustive(objective, options.exhaustive_limit),
    }
}

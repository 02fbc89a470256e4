use std::io::Write;

use serde::{Deserialize, Serialize};

use super::exhaustive::exhaustive_filtered;
use super::setfn::{KindFunction, ObjectiveKind};
use super::{solve, Algorithm, Selection, SolveOptions};
use crate::error::{Error, Result};
use crate::model::AttrSet;
use crate::objectives::Objective;

/// Bisection steps over lambda for the budget-constrained problem.
pub const CONSTRAINED_ITERATIONS: usize = 40;

pub const CURVE_HEADER: [&str; 8] = [
    "lambda",
    "attrs",
    "utility_bits",
    "identifiability",
    "sensitivity_bits",
    "objective",
    "upper_bound",
    "eval_count",
];

/// Upper bound on `max_A F_lambda(A)` computed around `reference`.
///
/// With `eta_V = U(R + V) - U(R) - lambda (C({V}) - C(empty))` the bound is
/// `U(R) - lambda C(empty) + sum of the positive eta_V`. Valid whenever `U` is
/// nondecreasing submodular and `C` nondecreasing supermodular.
pub fn online_bound(objective: &Objective, reference: AttrSet) -> Result<f64> {
    let universe = objective.candidates();
    if !reference.is_subset_of(universe) {
        return Err(Error::InvalidArgument("reference set must lie within the candidates".into()));
    }
    let lambda = objective.lambda();
    let u_ref = objective.utility(reference)?;
    let c_empty = objective.total_cost(AttrSet::empty())?;
    let mut bound = u_ref - lambda * c_empty;
    for v in universe.difference(reference).iter() {
        let eta = objective.utility(reference.with(v))? - u_ref
            - lambda * (objective.total_cost(AttrSet::singleton(v))? - c_empty);
        if eta > 0.0 {
            bound += eta;
        }
    }
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub selection: Selection,
}

/// Solutions for an increasing sequence of lambdas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub points: Vec<CurvePoint>,
}

impl TradeoffCurve {
    /// One CSV row per point under [`CURVE_HEADER`]; attributes are `+`-joined.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let to_io = |e: csv::Error| Error::Io(e.into());
        w.write_record(CURVE_HEADER).map_err(to_io)?;
        for p in &self.points {
            let s = &p.selection;
            let e = &s.evaluation;
            w.write_record([
                p.lambda.to_string(),
                s.attrs.join("+"),
                e.utility.to_string(),
                e.identifiability.to_string(),
                e.sensitivity.to_string(),
                e.objective.to_string(),
                s.upper_bound.map(|b| b.to_string()).unwrap_or_default(),
                s.eval_count.to_string(),
            ])
            .map_err(to_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves `F_lambda` for every lambda of a strictly increasing, nonnegative
/// grid and attaches the online bound around each solution.
pub fn sweep_lambda(objective: &Objective, lambdas: &[f64], options: &SolveOptions) -> Result<TradeoffCurve> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("lambda grid must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let obj = objective.with_lambda(lambda)?;
        let mut selection = solve(&obj, options)?;
        selection.upper_bound = Some(online_bound(&obj, selection.chosen)?);
        points.push(CurvePoint { lambda, selection });
    }
    Ok(TradeoffCurve { points })
}

/// Result of maximizing utility under a cost budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedSelection {
    /// Best feasible solution found by the lambda search, evaluated at `lambda`.
    pub selection: Selection,
    /// Lambda that produced the solution; `None` for the empty set fallback.
    pub lambda: Option<f64>,
    /// Upper end of the searched lambda interval.
    pub lambda_hi: f64,
    pub iterations: usize,
    /// Direct enumeration of the constrained problem, for the exhaustive algorithm.
    pub direct_optimum: Option<Selection>,
}

/// Maximizes `U(A)` subject to `C(A) <= budget` by bisecting lambda in
/// `F_lambda` and keeping the best feasible solution produced.
pub fn constrained_max_utility(
    objective: &Objective,
    budget: f64,
    options: &SolveOptions,
) -> Result<ConstrainedSelection> {
    if !(budget >= 0.0) || !budget.is_finite() {
        return Err(Error::InvalidArgument(format!("budget must be finite and >= 0, got {budget}")));
    }
    let universe = objective.candidates();
    let min_singleton = universe
        .iter()
        .map(|v| objective.total_cost(AttrSet::singleton(v)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&c| c > 0.0)
        .fold(f64::INFINITY, f64::min);
    let lambda_hi = objective.utility(universe)? / min_singleton.max(1e-9).min(f64::MAX);

    // (utility, cost, set, lambda)
    let mut best: Option<(f64, f64, AttrSet, Option<f64>)> = None;
    let mut cheapest = f64::INFINITY;
    let mut eval_count = 0;
    let mut consider = |set: AttrSet, lambda: Option<f64>, best: &mut Option<(f64, f64, AttrSet, Option<f64>)>| -> Result<bool> {
        let u = objective.utility(set)?;
        let c = objective.total_cost(set)?;
        cheapest = cheapest.min(c);
        if c > budget {
            return Ok(false);
        }
        let better = match best {
            None => true,
            Some((bu, bc, bs, _)) => {
                u > *bu || (u == *bu && (c < *bc || (c == *bc && set.canonical_cmp(*bs).is_lt())))
            }
        };
        if better {
            *best = Some((u, c, set, lambda));
        }
        Ok(true)
    };

    let mut iterations = 0;
    let first = solve(&objective.with_lambda(0.0)?, options)?;
    eval_count += first.eval_count;
    if !consider(first.chosen, Some(0.0), &mut best)? {
        let (mut lo, mut hi) = (0.0, lambda_hi);
        for _ in 0..CONSTRAINED_ITERATIONS {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            let sel = solve(&objective.with_lambda(mid)?, options)?;
            eval_count += sel.eval_count;
            if consider(sel.chosen, Some(mid), &mut best)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        consider(AttrSet::empty(), None, &mut best)?;
    }

    let Some((_, _, set, lambda)) = best else {
        return Err(Error::Infeasible { budget, cheapest });
    };
    let obj = objective.with_lambda(lambda.unwrap_or(objective.lambda()))?;
    let selection = Selection::from_set(&obj, set, 0, eval_count)?;

    let direct_optimum = if options.algorithm == Algorithm::Exhaustive {
        let out = exhaustive_filtered(
            KindFunction::new(objective, ObjectiveKind::UtilityOnly),
            options.exhaustive_limit,
            |s| objective.total_cost(s).is_ok_and(|c| c <= budget),
        )?;
        out.converged
            .then(|| Selection::from_set(objective, out.chosen, 0, out.eval_count))
            .transpose()?
    } else {
        None
    };

    Ok(ConstrainedSelection {
        selection,
        lambda,
        lambda_hi,
        iterations,
        direct_optimum,
    })
}

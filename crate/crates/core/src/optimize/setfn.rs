use std::cell::Cell;

use crate::model::AttrSet;
use crate::objectives::Objective;

/// A real-valued function over subsets of a finite universe.
pub trait SetFunction {
    fn universe(&self) -> AttrSet;
    fn value(&self, set: AttrSet) -> f64;
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn universe(&self) -> AttrSet {
        (**self).universe()
    }

    fn value(&self, set: AttrSet) -> f64 {
        (**self).value(set)
    }
}

/// `F_lambda` over the objective's candidate attributes.
impl SetFunction for Objective {
    fn universe(&self) -> AttrSet {
        self.candidates()
    }

    fn value(&self, set: AttrSet) -> f64 {
        self.evaluate_unchecked(set).objective
    }
}

/// Set function backed by a closure.
pub struct FnSetFunction<F> {
    universe: AttrSet,
    f: F,
}

pub fn from_fn<F: Fn(AttrSet) -> f64>(universe: AttrSet, f: F) -> FnSetFunction<F> {
    FnSetFunction { universe, f }
}

impl<F: Fn(AttrSet) -> f64> SetFunction for FnSetFunction<F> {
    fn universe(&self) -> AttrSet {
        self.universe
    }

    fn value(&self, set: AttrSet) -> f64 {
        (self.f)(set)
    }
}

/// The quantity a greedy ordering follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Maximize utility gain.
    UtilityOnly,
    /// Minimize total cost increase.
    CostOnlyMin,
    /// Maximize `F_lambda`.
    Full,
}

impl ObjectiveKind {
    /// +1 for maximized kinds, -1 for minimized ones.
    pub fn sign(self) -> f64 {
        match self {
            ObjectiveKind::CostOnlyMin => -1.0,
            _ => 1.0,
        }
    }
}

/// One component of an objective as a set function.
pub struct KindFunction<'a> {
    objective: &'a Objective,
    kind: ObjectiveKind,
}

impl<'a> KindFunction<'a> {
    pub fn new(objective: &'a Objective, kind: ObjectiveKind) -> Self {
        KindFunction { objective, kind }
    }
}

impl SetFunction for KindFunction<'_> {
    fn universe(&self) -> AttrSet {
        self.objective.candidates()
    }

    fn value(&self, set: AttrSet) -> f64 {
        match self.kind {
            ObjectiveKind::UtilityOnly => self.objective.utility_unchecked(set),
            ObjectiveKind::CostOnlyMin => self.objective.cost_unchecked(set),
            ObjectiveKind::Full => self.objective.evaluate_unchecked(set).objective,
        }
    }
}

/// `F'(A) = F(A) - F(V)`; same maximizers as `F`, and `F'(V) = 0`.
#[derive(Debug, Clone)]
pub struct NormalizedObjective {
    objective: Objective,
    offset: f64,
}

pub fn normalize_objective(objective: &Objective) -> NormalizedObjective {
    let offset = objective.value(objective.candidates());
    NormalizedObjective {
        objective: objective.clone(),
        offset,
    }
}

impl NormalizedObjective {
    /// `F(V)`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn inner(&self) -> &Objective {
        &self.objective
    }
}

impl SetFunction for NormalizedObjective {
    fn universe(&self) -> AttrSet {
        self.objective.candidates()
    }

    fn value(&self, set: AttrSet) -> f64 {
        if set == self.objective.candidates() {
            return 0.0;
        }
        self.objective.value(set) - self.offset
    }
}

/// Counts oracle calls.
pub(crate) struct Counted<F> {
    pub inner: F,
    calls: Cell<usize>,
}

impl<F: SetFunction> Counted<F> {
    pub fn new(inner: F) -> Self {
        Counted {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn value(&self, set: AttrSet) -> f64 {
        self.calls.set(self.calls.get() + 1);
        self.inner.value(set)
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }
}

//! Utility, identifiability, sensitivity and the scalarized objective
//! `F(A) = U(A) - lambda * (I(A) + S(A))`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::entropy::{entropy_bits, smoothed_entropy};
use super::metric::CostMetric;
use super::sampling::{subset_seed, SamplingPlan};
use crate::error::{Error, Result};
use crate::model::{AttrSet, AttributeSchema, EventLog, JointModel, SmoothingConfig, DEFAULT_ENUMERATION_LIMIT};

/// Where probabilities come from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// An exact joint model; evaluated by enumeration, smoothing does not apply.
    Model(Arc<JointModel>),
    /// The empirical distribution of a log, with smoothed conditionals.
    Log(Arc<EventLog>),
}

impl DataSource {
    pub fn schema(&self) -> &AttributeSchema {
        match self {
            DataSource::Model(m) => m.schema(),
            DataSource::Log(l) => l.schema(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Exact,
    Sampled(SamplingPlan),
}

#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    /// Privacy-to-utility conversion factor.
    pub lambda: f64,
    pub metric: CostMetric,
    /// `s(a)` per schema attribute.
    pub sensitivities: Vec<f64>,
    pub smoothing: SmoothingConfig,
    pub source: DataSource,
    pub mode: EvalMode,
    /// Attributes the optimizers may select; defaults to the whole schema.
    pub candidates: AttrSet,
    /// Bound on enumerated attribute tuples for exact evaluation of a model.
    pub enumeration_limit: u128,
}

impl ObjectiveSpec {
    fn with_source(source: DataSource, mode: EvalMode) -> Self {
        let schema = source.schema();
        ObjectiveSpec {
            lambda: 0.0,
            metric: CostMetric::MaxProb,
            sensitivities: schema.sensitivities(),
            smoothing: SmoothingConfig::default(),
            candidates: schema.full_set(),
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            source,
            mode,
        }
    }

    pub fn exact_model(model: Arc<JointModel>) -> Self {
        Self::with_source(DataSource::Model(model), EvalMode::Exact)
    }

    pub fn exact_log(log: Arc<EventLog>) -> Self {
        Self::with_source(DataSource::Log(log), EvalMode::Exact)
    }

    pub fn sampled_log(log: Arc<EventLog>, plan: SamplingPlan) -> Self {
        Self::with_source(DataSource::Log(log), EvalMode::Sampled(plan))
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn metric(mut self, metric: CostMetric) -> Self {
        self.metric = metric;
        self
    }

    pub fn smoothing(mut self, smoothing: SmoothingConfig) -> Self {
        self.smoothing = smoothing;
        self
    }

    pub fn sensitivities(mut self, sensitivities: Vec<f64>) -> Self {
        self.sensitivities = sensitivities;
        self
    }

    pub fn candidates(mut self, candidates: AttrSet) -> Self {
        self.candidates = candidates;
        self
    }

    pub fn schema(&self) -> &AttributeSchema {
        self.source.schema()
    }

    pub fn build(self) -> Result<Objective> {
        Objective::new(self)
    }
}

/// Every component of one objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Entropy reduction in bits.
    pub utility: f64,
    pub identifiability: f64,
    pub sensitivity: f64,
    /// `identifiability + sensitivity`.
    pub cost: f64,
    /// `utility - lambda * cost`.
    pub objective: f64,
    pub lambda: f64,
    /// Rows drawn per estimate; 0 in exact mode.
    pub n_samples_used: usize,
    pub eval_count: usize,
}

impl Evaluation {
    fn assemble(lambda: f64, utility: f64, identifiability: f64, sensitivity: f64, n: usize) -> Self {
        let cost = identifiability + sensitivity;
        Evaluation {
            utility,
            identifiability,
            sensitivity,
            cost,
            objective: utility - lambda * cost,
            lambda,
            n_samples_used: n,
            eval_count: 1,
        }
    }
}

/// A prepared objective. Cheap to clone; precomputed tables are shared.
#[derive(Debug, Clone)]
pub struct Objective {
    spec: ObjectiveSpec,
    backend: Arc<Backend>,
    n_samples: usize,
}

#[derive(Debug)]
enum Backend {
    Model(ModelTables),
    Log(LogTables),
}

impl Objective {
    pub fn new(spec: ObjectiveSpec) -> Result<Self> {
        validate_spec(&spec)?;
        let backend = match &spec.source {
            DataSource::Model(model) => {
                if let EvalMode::Sampled(_) = spec.mode {
                    return Err(Error::InvalidArgument(
                        "sampled evaluation needs an event log source".into(),
                    ));
                }
                Backend::Model(ModelTables::new(model.clone(), spec.enumeration_limit)?)
            }
            DataSource::Log(log) => Backend::Log(LogTables::new(log.clone(), spec.smoothing)),
        };
        let n_samples = match (&spec.mode, &backend) {
            (EvalMode::Sampled(plan), Backend::Log(t)) => plan.resolve(t.max_intents)?,
            _ => 0,
        };
        Ok(Objective {
            spec,
            backend: Arc::new(backend),
            n_samples,
        })
    }

    /// Same data and settings, different lambda; shares precomputed tables.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let mut next = self.clone();
        next.spec.lambda = lambda;
        Ok(next)
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn schema(&self) -> &AttributeSchema {
        self.spec.schema()
    }

    pub fn lambda(&self) -> f64 {
        self.spec.lambda
    }

    pub fn candidates(&self) -> AttrSet {
        self.spec.candidates
    }

    /// Rows drawn per sampled estimate; 0 in exact mode.
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Largest intent domain of any query.
    pub fn max_intents(&self) -> usize {
        match &*self.backend {
            Backend::Model(t) => t.model.n_intents(),
            Backend::Log(t) => t.max_intents,
        }
    }

    fn check(&self, set: AttrSet) -> Result<()> {
        if self.schema().contains_set(set) {
            Ok(())
        } else {
            let bad = set.difference(self.schema().full_set()).iter().next().unwrap_or(0);
            Err(Error::UnknownAttribute(format!("#{bad}")))
        }
    }

    fn sample_rows(&self, set: AttrSet, n_rows: usize) -> Option<Vec<usize>> {
        match self.spec.mode {
            EvalMode::Exact => None,
            EvalMode::Sampled(plan) => {
                let mut rng = ChaCha8Rng::seed_from_u64(subset_seed(plan.seed, set));
                Some((0..self.n_samples).map(|_| rng.random_range(0..n_rows)).collect())
            }
        }
    }

    /// Expected entropy reduction `H(X | Q) - H(X | Q, A)` in bits.
    pub fn utility(&self, set: AttrSet) -> Result<f64> {
        self.check(set)?;
        Ok(self.utility_unchecked(set))
    }

    /// Expected identifiability loss of `P(Y | A = a)` over patterns `a`.
    pub fn identifiability(&self, set: AttrSet) -> Result<f64> {
        self.check(set)?;
        Ok(self.identifiability_unchecked(set))
    }

    /// Additive sensitivity `S(A) = sum of s(a)`.
    pub fn sensitivity_cost(&self, set: AttrSet) -> Result<f64> {
        self.check(set)?;
        Ok(self.sensitivity_unchecked(set))
    }

    /// `C(A) = I(A) + S(A)`.
    pub fn total_cost(&self, set: AttrSet) -> Result<f64> {
        self.check(set)?;
        Ok(self.cost_unchecked(set))
    }

    pub fn evaluate(&self, set: AttrSet) -> Result<Evaluation> {
        self.check(set)?;
        Ok(self.evaluate_unchecked(set))
    }

    pub(crate) fn evaluate_unchecked(&self, set: AttrSet) -> Evaluation {
        let (u, i) = match &*self.backend {
            Backend::Model(t) => (t.utility(set), t.identifiability(set, self.spec.metric)),
            Backend::Log(t) => {
                // one sample stream for both estimates
                let rows = self.sample_rows(set, t.n_rows());
                let u = if set.is_empty() { 0.0 } else { t.utility(set, rows.as_deref()) };
                (u, t.identifiability(set, self.spec.metric, rows.as_deref()))
            }
        };
        Evaluation::assemble(self.spec.lambda, u, i, self.sensitivity_unchecked(set), self.n_samples)
    }

    pub(crate) fn utility_unchecked(&self, set: AttrSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        match &*self.backend {
            Backend::Model(t) => t.utility(set),
            Backend::Log(t) => t.utility(set, self.sample_rows(set, t.n_rows()).as_deref()),
        }
    }

    pub(crate) fn identifiability_unchecked(&self, set: AttrSet) -> f64 {
        match &*self.backend {
            Backend::Model(t) => t.identifiability(set, self.spec.metric),
            Backend::Log(t) => {
                t.identifiability(set, self.spec.metric, self.sample_rows(set, t.n_rows()).as_deref())
            }
        }
    }

    pub(crate) fn sensitivity_unchecked(&self, set: AttrSet) -> f64 {
        set.iter().fold(0.0, |acc, i| acc + self.spec.sensitivities[i])
    }

    pub(crate) fn cost_unchecked(&self, set: AttrSet) -> f64 {
        self.identifiability_unchecked(set) + self.sensitivity_unchecked(set)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

fn validate_spec(spec: &ObjectiveSpec) -> Result<()> {
    check_lambda(spec.lambda)?;
    let schema = spec.schema();
    if spec.sensitivities.len() != schema.len() {
        return Err(Error::InvalidArgument(format!(
            "{} sensitivities for {} attributes",
            spec.sensitivities.len(),
            schema.len()
        )));
    }
    if let Some(s) = spec.sensitivities.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid sensitivity {s}")));
    }
    if !schema.contains_set(spec.candidates) {
        return Err(Error::InvalidArgument("candidate set exceeds the schema".into()));
    }
    SmoothingConfig::new(spec.smoothing.pseudocount)?;
    Ok(())
}

/// Exact evaluation on a joint model.
#[derive(Debug)]
struct ModelTables {
    model: Arc<JointModel>,
    tuple_probs: Vec<f64>,
    /// `H(X | Q)`.
    base_entropy: f64,
}

impl ModelTables {
    fn new(model: Arc<JointModel>, limit: u128) -> Result<Self> {
        let tuple_probs = model.tuple_probs(limit)?;
        let base_entropy = model
            .query_probs()
            .iter()
            .enumerate()
            .map(|(q, pq)| pq * entropy_bits(model.intent_given_query(q)))
            .sum();
        Ok(ModelTables {
            model,
            tuple_probs,
            base_entropy,
        })
    }

    fn utility(&self, set: AttrSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        let m = &*self.model;
        let attrs: Vec<usize> = set.iter().collect();
        let cards: Vec<usize> = attrs.iter().map(|&i| m.schema().attribute(i).cardinality).collect();
        let n_patterns: usize = cards.iter().product();
        let n_intents = m.n_intents();
        // likelihood[p][x] = prod_{i in A} P(a_i | x)
        let mut likelihood = vec![0.0; n_patterns * n_intents];
        let mut digits = vec![0usize; attrs.len()];
        for p in 0..n_patterns {
            for x in 0..n_intents {
                likelihood[p * n_intents + x] = attrs
                    .iter()
                    .zip(&digits)
                    .map(|(&i, &d)| m.attr_prob(i, x, d))
                    .product();
            }
            crate::model::joint_increment(&mut digits, &cards);
        }
        let mut conditional = 0.0;
        let mut joint = vec![0.0; n_intents];
        for (q, &pq) in m.query_probs().iter().enumerate() {
            if pq == 0.0 {
                continue;
            }
            let px = m.intent_given_query(q);
            for p in 0..n_patterns {
                let lik = &likelihood[p * n_intents..(p + 1) * n_intents];
                let mut pa = 0.0;
                for x in 0..n_intents {
                    joint[x] = px[x] * lik[x];
                    pa += joint[x];
                }
                if pa <= 0.0 {
                    continue;
                }
                let h: f64 = joint
                    .iter()
                    .filter(|&&j| j > 0.0)
                    .map(|&j| -j * (j / pa).log2())
                    .sum();
                conditional += pq * h;
            }
        }
        self.base_entropy - conditional
    }

    fn identifiability(&self, set: AttrSet, metric: CostMetric) -> f64 {
        let schema = self.model.schema();
        let cards = schema.cardinalities();
        // compact stride of each attribute in A, 0 elsewhere
        let mut compact = vec![0usize; cards.len()];
        let mut n_patterns = 1usize;
        for i in set.iter() {
            compact[i] = n_patterns;
            n_patterns *= cards[i];
        }
        let mut mass = vec![0.0; n_patterns];
        let mut max = vec![0.0f64; n_patterns];
        let mut support = vec![0usize; n_patterns];
        let mut digits = vec![0usize; cards.len()];
        for &p in &self.tuple_probs {
            let idx: usize = set.iter().map(|i| digits[i] * compact[i]).sum();
            if p > 0.0 {
                mass[idx] += p;
                max[idx] = max[idx].max(p);
                support[idx] += 1;
            }
            crate::model::joint_increment(&mut digits, &cards);
        }
        let mut total = 0.0;
        for a in 0..n_patterns {
            if mass[a] <= 0.0 {
                continue;
            }
            total += match metric {
                // P(a) * max_y P(y | a) = max_y P(y, a)
                CostMetric::MaxProb => max[a],
                _ => mass[a] * metric.loss(max[a] / mass[a], support[a]),
            };
        }
        total
    }
}

/// Dense per-row indices of a log plus per-query baselines.
#[derive(Debug)]
struct LogTables {
    log: Arc<EventLog>,
    smoothing: SmoothingConfig,
    /// Dense query index per row.
    query: Vec<u32>,
    /// Intent index local to the row's query.
    intent: Vec<u32>,
    /// Dense user index per row.
    user: Vec<u32>,
    /// Intent domain size per dense query.
    query_domain: Vec<usize>,
    /// Smoothed `H(X | q)` per dense query.
    query_entropy: Vec<f64>,
    n_users: usize,
    max_intents: usize,
}

impl LogTables {
    fn new(log: Arc<EventLog>, smoothing: SmoothingConfig) -> Self {
        let mut query_ids: BTreeMap<u32, u32> = BTreeMap::new();
        let mut intent_ids: Vec<BTreeMap<u32, u32>> = Vec::new();
        let mut user_ids: BTreeMap<u64, u32> = BTreeMap::new();
        for r in log.records() {
            let next = query_ids.len() as u32;
            let q = *query_ids.entry(r.query).or_insert(next);
            if q as usize == intent_ids.len() {
                intent_ids.push(BTreeMap::new());
            }
            let next = intent_ids[q as usize].len() as u32;
            intent_ids[q as usize].entry(r.intent).or_insert(next);
            let next = user_ids.len() as u32;
            user_ids.entry(r.user).or_insert(next);
        }
        let n = log.len();
        let mut query = Vec::with_capacity(n);
        let mut intent = Vec::with_capacity(n);
        let mut user = Vec::with_capacity(n);
        let mut intent_counts: Vec<Vec<u64>> = intent_ids.iter().map(|m| vec![0; m.len()]).collect();
        for r in log.records() {
            let q = query_ids[&r.query];
            let x = intent_ids[q as usize][&r.intent];
            query.push(q);
            intent.push(x);
            user.push(user_ids[&r.user]);
            intent_counts[q as usize][x as usize] += 1;
        }
        let query_domain: Vec<usize> = intent_ids.iter().map(BTreeMap::len).collect();
        let query_entropy = intent_counts
            .iter()
            .map(|c| smoothed_entropy(c, c.len(), smoothing))
            .collect();
        let max_intents = query_domain.iter().copied().max().unwrap_or(1);
        LogTables {
            log,
            smoothing,
            query,
            intent,
            user,
            query_domain,
            query_entropy,
            n_users: user_ids.len(),
            max_intents,
        }
    }

    fn n_rows(&self) -> usize {
        self.query.len()
    }

    fn pattern_keys(&self, set: AttrSet) -> Vec<u64> {
        let schema = self.log.schema();
        let strides: Vec<(usize, u64)> = set.iter().map(|i| (i, schema.stride(i))).collect();
        self.log
            .records()
            .iter()
            .map(|r| strides.iter().map(|&(i, s)| r.values[i] as u64 * s).sum())
            .collect()
    }

    fn average(values: &[f64], rows: Option<&[usize]>) -> f64 {
        match rows {
            None => values.iter().sum::<f64>() / values.len() as f64,
            Some(rows) => rows.iter().map(|&r| values[r]).sum::<f64>() / rows.len() as f64,
        }
    }

    /// Per-row `H(X | q) - H(X | q, a)`, averaged over all rows or the sampled ones.
    fn utility(&self, set: AttrSet, rows: Option<&[usize]>) -> f64 {
        let keys = self.pattern_keys(set);
        let mut order: Vec<(u32, u64, u32, u32)> = (0..self.n_rows())
            .map(|r| (self.query[r], keys[r], self.intent[r], r as u32))
            .collect();
        order.sort_unstable();
        let mut per_row = vec![0.0; self.n_rows()];
        let mut counts = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let (q, key, _, _) = order[start];
            let mut end = start;
            counts.clear();
            while end < order.len() && order[end].0 == q && order[end].1 == key {
                let x = order[end].2;
                let mut run = 0;
                while end < order.len() && order[end].0 == q && order[end].1 == key && order[end].2 == x {
                    run += 1;
                    end += 1;
                }
                counts.push(run);
            }
            let h = smoothed_entropy(&counts, self.query_domain[q as usize], self.smoothing);
            let gain = self.query_entropy[q as usize] - h;
            for item in &order[start..end] {
                per_row[item.3 as usize] = gain;
            }
            start = end;
        }
        Self::average(&per_row, rows)
    }

    /// Per-row loss of the smoothed `P(Y | a)`; k-anonymity counts the unsmoothed support.
    fn identifiability(&self, set: AttrSet, metric: CostMetric, rows: Option<&[usize]>) -> f64 {
        let keys = self.pattern_keys(set);
        let mut order: Vec<(u64, u32, u32)> = (0..self.n_rows())
            .map(|r| (keys[r], self.user[r], r as u32))
            .collect();
        order.sort_unstable();
        let mut per_row = vec![0.0; self.n_rows()];
        let mut start = 0;
        while start < order.len() {
            let key = order[start].0;
            let mut end = start;
            let mut max_count = 0u64;
            let mut support = 0usize;
            while end < order.len() && order[end].0 == key {
                let u = order[end].1;
                let mut run = 0;
                while end < order.len() && order[end].0 == key && order[end].1 == u {
                    run += 1;
                    end += 1;
                }
                max_count = max_count.max(run);
                support += 1;
            }
            let total = (end - start) as u64;
            let max_prob = self.smoothing.probability(max_count, total, self.n_users);
            let loss = metric.loss(max_prob, support);
            for item in &order[start..end] {
                per_row[item.2 as usize] = loss;
            }
            start = end;
        }
        Self::average(&per_row, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_log, AttributeDef, AttributeSchema};

    const FIXTURE: &str = "user,query,intent,V\n1,0,1,0\n2,0,1,0\n3,0,2,1\n4,0,3,1\n";

    fn fixture() -> Arc<EventLog> {
        let schema = AttributeSchema::new(vec![AttributeDef::new("V", 2)]).unwrap();
        Arc::new(load_log(FIXTURE.as_bytes(), &schema).unwrap())
    }

    fn exact(lambda: f64) -> Objective {
        ObjectiveSpec::exact_log(fixture())
            .smoothing(SmoothingConfig::none())
            .lambda(lambda)
            .build()
            .unwrap()
    }

    #[test]
    fn four_record_utility() {
        let obj = exact(0.0);
        let v = AttrSet::singleton(0);
        assert_eq!(obj.utility(AttrSet::empty()).unwrap(), 0.0);
        assert!((obj.utility(v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_record_objective() {
        let obj = exact(1.0);
        let e = obj.evaluate(AttrSet::singleton(0)).unwrap();
        assert!((e.identifiability - 0.5).abs() < 1e-12);
        assert!((e.objective - 0.5).abs() < 1e-12);
        assert_eq!(obj.identifiability(AttrSet::empty()).unwrap(), 0.25);
    }

    #[test]
    fn kanon_fixture() {
        let schema = AttributeSchema::new(vec![AttributeDef::new("V", 2)]).unwrap();
        let log = load_log("user,query,intent,V\n1,0,0,0\n2,0,0,0\n3,0,0,1\n".as_bytes(), &schema).unwrap();
        let obj = ObjectiveSpec::exact_log(Arc::new(log))
            .metric(CostMetric::kanon(2).unwrap())
            .build()
            .unwrap();
        assert!((obj.identifiability(AttrSet::singleton(0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let k1 = obj.spec().clone().metric(CostMetric::kanon(1).unwrap()).build().unwrap();
        assert_eq!(k1.identifiability(AttrSet::singleton(0)).unwrap(), 0.0);
    }

    #[test]
    fn sensitivity_sum() {
        let schema = AttributeSchema::new(vec![AttributeDef::new("V1", 2), AttributeDef::new("V2", 2)]).unwrap();
        let model = JointModel::independent_marginals(schema, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let obj = ObjectiveSpec::exact_model(Arc::new(model))
            .sensitivities(vec![0.5, 1.25])
            .lambda(2.0)
            .build()
            .unwrap();
        assert_eq!(obj.sensitivity_cost(AttrSet::empty()).unwrap(), 0.0);
        assert_eq!(obj.sensitivity_cost(AttrSet::full(2)).unwrap(), 1.75);
    }

    #[test]
    fn evaluation_arithmetic() {
        let e = Evaluation::assemble(2.0, 1.0, 0.25, 0.05, 0);
        assert!((e.cost - 0.3).abs() < 1e-12);
        assert!((e.objective - 0.4).abs() < 1e-12);
    }

    #[test]
    fn lambda_zero_objective_is_utility() {
        let obj = exact(0.0);
        for set in AttrSet::full(1).subsets() {
            let e = obj.evaluate(set).unwrap();
            assert_eq!(e.objective, e.utility);
        }
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(ObjectiveSpec::exact_log(fixture()).lambda(-1.0).build().is_err());
        assert!(ObjectiveSpec::exact_log(fixture()).sensitivities(vec![]).build().is_err());
        assert!(ObjectiveSpec::exact_log(fixture())
            .candidates(AttrSet::from_indices([3]))
            .build()
            .is_err());
        let obj = exact(0.0);
        assert!(matches!(obj.utility(AttrSet::singleton(5)), Err(Error::UnknownAttribute(_))));
    }

    #[test]
    fn sampled_is_deterministic_per_subset() {
        let obj = ObjectiveSpec::sampled_log(fixture(), SamplingPlan::fixed(50, 9))
            .smoothing(SmoothingConfig::none())
            .build()
            .unwrap();
        let v = AttrSet::singleton(0);
        let a = obj.evaluate(v).unwrap();
        assert_eq!(a, obj.evaluate(v).unwrap());
        assert_eq!(a.utility, obj.utility(v).unwrap());
        assert_eq!(a.n_samples_used, 50);
        assert_eq!(obj.utility(AttrSet::empty()).unwrap(), 0.0);
    }

    #[test]
    fn model_enumeration_limit() {
        let schema = AttributeSchema::new(vec![AttributeDef::new("V1", 4), AttributeDef::new("V2", 4)]).unwrap();
        let model = JointModel::independent_marginals(schema, vec![vec![0.25; 4], vec![0.25; 4]]).unwrap();
        let mut spec = ObjectiveSpec::exact_model(Arc::new(model));
        spec.enumeration_limit = 8;
        assert!(matches!(spec.build(), Err(Error::EnumerationLimit { .. })));
    }
}

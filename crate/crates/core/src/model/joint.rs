//! Exact, enumerable joint distributions over (query, intent, attributes).
//!
//! Both modes share one parameterization: a query prior `P(Q)`, per-query
//! intent distributions `P(X | Q)` and per-attribute tables. In naive-Bayes
//! mode the tables are `P(V_i | X)`, so the attributes are conditionally
//! independent given the intent. In independent-identity mode each attribute
//! has a single marginal `P(V_i)` independent of everything else. In both
//! modes the user identity is the full attribute tuple.

use serde::{Deserialize, Serialize};

use super::schema::{AttributeDef, AttributeSchema, AttrSet};
use crate::error::{Error, Result};

/// Tolerance for probability tables summing to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Default bound on the number of enumerated outcome cells.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    NaiveBayes,
    IndependentIdentity,
}

#[derive(Debug, Clone)]
pub struct JointModel {
    schema: AttributeSchema,
    mode: ModelMode,
    query_probs: Vec<f64>,
    intent_given_query: Vec<Vec<f64>>,
    /// `[attribute][intent][value]` in naive-Bayes mode, `[attribute][0][value]` otherwise.
    attr_tables: Vec<Vec<Vec<f64>>>,
}

impl JointModel {
    pub fn naive_bayes(
        schema: AttributeSchema,
        query_probs: Vec<f64>,
        intent_given_query: Vec<Vec<f64>>,
        attr_given_intent: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let model = JointModel {
            schema,
            mode: ModelMode::NaiveBayes,
            query_probs,
            intent_given_query,
            attr_tables: attr_given_intent,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn independent_identity(
        schema: AttributeSchema,
        marginals: Vec<Vec<f64>>,
        query_probs: Vec<f64>,
        intent_given_query: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let model = JointModel {
            schema,
            mode: ModelMode::IndependentIdentity,
            query_probs,
            intent_given_query,
            attr_tables: marginals.into_iter().map(|m| vec![m]).collect(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Independent-identity model with one query and one intent.
    pub fn independent_marginals(schema: AttributeSchema, marginals: Vec<Vec<f64>>) -> Result<Self> {
        Self::independent_identity(schema, marginals, vec![1.0], vec![vec![1.0]])
    }

    fn validate(&self) -> Result<()> {
        check_distribution(&self.query_probs, "query prior")?;
        if self.intent_given_query.len() != self.query_probs.len() {
            return Err(Error::Model(format!(
                "{} intent rows for {} queries",
                self.intent_given_query.len(),
                self.query_probs.len()
            )));
        }
        let n_intents = self.intent_given_query.first().map_or(0, Vec::len);
        if n_intents == 0 {
            return Err(Error::Model("intent domain is empty".into()));
        }
        for (q, row) in self.intent_given_query.iter().enumerate() {
            if row.len() != n_intents {
                return Err(Error::Model(format!("intent row of query {q} has length {}", row.len())));
            }
            check_distribution(row, &format!("P(X | Q={q})"))?;
        }
        if self.attr_tables.len() != self.schema.len() {
            return Err(Error::Model(format!(
                "{} attribute tables for {} attributes",
                self.attr_tables.len(),
                self.schema.len()
            )));
        }
        let rows = match self.mode {
            ModelMode::NaiveBayes => n_intents,
            ModelMode::IndependentIdentity => 1,
        };
        for (attr, table) in self.schema.attributes().iter().zip(&self.attr_tables) {
            if table.len() != rows {
                return Err(Error::Model(format!(
                    "attribute `{}` has {} table rows, expected {rows}",
                    attr.name,
                    table.len()
                )));
            }
            for row in table {
                if row.len() != attr.cardinality {
                    return Err(Error::Model(format!(
                        "attribute `{}` row has {} entries for cardinality {}",
                        attr.name,
                        row.len(),
                        attr.cardinality
                    )));
                }
                check_distribution(row, &attr.name)?;
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn mode(&self) -> ModelMode {
        self.mode
    }

    pub fn n_queries(&self) -> usize {
        self.query_probs.len()
    }

    pub fn n_intents(&self) -> usize {
        self.intent_given_query[0].len()
    }

    pub fn query_probs(&self) -> &[f64] {
        &self.query_probs
    }

    pub fn intent_given_query(&self, query: usize) -> &[f64] {
        &self.intent_given_query[query]
    }

    /// `P(V_attr = value | X = intent)`; the intent is ignored in independent-identity mode.
    pub fn attr_prob(&self, attr: usize, intent: usize, value: usize) -> f64 {
        match self.mode {
            ModelMode::NaiveBayes => self.attr_tables[attr][intent][value],
            ModelMode::IndependentIdentity => self.attr_tables[attr][0][value],
        }
    }

    /// Distribution over values of `attr` for the given intent (or the marginal).
    pub fn attr_row(&self, attr: usize, intent: usize) -> &[f64] {
        match self.mode {
            ModelMode::NaiveBayes => &self.attr_tables[attr][intent],
            ModelMode::IndependentIdentity => &self.attr_tables[attr][0],
        }
    }

    /// Marginal `P(V_attr)`.
    pub fn attr_marginal(&self, attr: usize) -> Vec<f64> {
        match self.mode {
            ModelMode::IndependentIdentity => self.attr_tables[attr][0].clone(),
            ModelMode::NaiveBayes => {
                let px = self.intent_marginal();
                let card = self.schema.attribute(attr).cardinality;
                (0..card)
                    .map(|v| px.iter().enumerate().map(|(x, p)| p * self.attr_tables[attr][x][v]).sum())
                    .collect()
            }
        }
    }

    /// `P(X) = sum_q P(q) P(X | q)`.
    pub fn intent_marginal(&self) -> Vec<f64> {
        let mut px = vec![0.0; self.n_intents()];
        for (pq, row) in self.query_probs.iter().zip(&self.intent_given_query) {
            for (acc, p) in px.iter_mut().zip(row) {
                *acc += pq * p;
            }
        }
        px
    }

    /// Number of full attribute tuples.
    pub fn tuple_count(&self) -> u128 {
        self.schema.pattern_count(self.schema.full_set())
    }

    /// `P(V = v)` for every full tuple code `v`, in code order.
    pub fn tuple_probs(&self, limit: u128) -> Result<Vec<f64>> {
        let cells = self.tuple_count();
        if cells > limit {
            return Err(Error::EnumerationLimit { cells, limit });
        }
        let n = self.tuple_count() as usize;
        let cards = self.schema.cardinalities();
        let weights: Vec<f64> = match self.mode {
            ModelMode::NaiveBayes => self.intent_marginal(),
            ModelMode::IndependentIdentity => vec![1.0],
        };
        let mut probs = vec![0.0; n];
        let mut digits = vec![0usize; cards.len()];
        for p in probs.iter_mut() {
            let mut total = 0.0;
            for (x, w) in weights.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let mut prod = *w;
                for (i, &d) in digits.iter().enumerate() {
                    prod *= self.attr_tables[i][x][d];
                }
                total += prod;
            }
            *p = total;
            increment(&mut digits, &cards);
        }
        Ok(probs)
    }

    /// `P(X | Q = query, A = pattern)` under the model; zero-probability patterns
    /// yield the uniform distribution.
    pub fn intent_conditional(&self, query: usize, pattern: &[(usize, u32)]) -> Vec<f64> {
        let mut joint: Vec<f64> = self.intent_given_query[query]
            .iter()
            .enumerate()
            .map(|(x, &p)| {
                pattern
                    .iter()
                    .fold(p, |acc, &(i, v)| acc * self.attr_prob(i, x, v as usize))
            })
            .collect();
        normalize_or_uniform(&mut joint);
        joint
    }

    /// `P(Y | A = pattern)` over full tuple codes, given precomputed tuple probabilities.
    pub fn user_conditional(&self, tuple_probs: &[f64], pattern: &[(usize, u32)]) -> Vec<f64> {
        let mut out: Vec<f64> = tuple_probs
            .iter()
            .enumerate()
            .map(|(code, &p)| {
                let matches = pattern.iter().all(|&(i, v)| {
                    (code as u64 / self.schema.stride(i)) % self.schema.attribute(i).cardinality as u64
                        == v as u64
                });
                if matches {
                    p
                } else {
                    0.0
                }
            })
            .collect();
        normalize_or_uniform(&mut out);
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile::from_model(self);
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    /// Copy of the model restricted to the attributes in `keep`.
    pub fn restrict(&self, keep: AttrSet) -> Result<Self> {
        let attrs: Vec<AttributeDef> = keep.iter().map(|i| self.schema.attribute(i).clone()).collect();
        let tables = keep.iter().map(|i| self.attr_tables[i].clone()).collect();
        let model = JointModel {
            schema: AttributeSchema::new(attrs)?,
            mode: self.mode,
            query_probs: self.query_probs.clone(),
            intent_given_query: self.intent_given_query.clone(),
            attr_tables: tables,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_schema(&self, schema: AttributeSchema) -> Result<Self> {
        if schema.cardinalities() != self.schema.cardinalities() {
            return Err(Error::Model("replacement schema has different domains".into()));
        }
        let mut model = self.clone();
        model.schema = schema;
        Ok(model)
    }
}

pub(crate) fn increment(digits: &mut [usize], cards: &[usize]) {
    for (d, &c) in digits.iter_mut().zip(cards) {
        *d += 1;
        if *d < c {
            return;
        }
        *d = 0;
    }
}

fn normalize_or_uniform(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|v| *v /= total);
    } else {
        let u = 1.0 / p.len() as f64;
        p.iter_mut().for_each(|v| *v = u);
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Model(format!("{what}: empty distribution")));
    }
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Model(format!("{what}: negative or non-finite probability")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Model(format!("{what}: probabilities sum to {total}")));
    }
    Ok(())
}

/// Probability written as a decimal string; numbers are accepted on input.
#[derive(Debug, Clone, Copy)]
struct Prob(f64);

impl Serialize for Prob {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}", self.0))
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Prob(v)),
            Raw::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Prob)
                .map_err(|_| serde::de::Error::custom(format!("`{s}` is not a decimal number"))),
        }
    }
}

fn unwrap(v: &[Prob]) -> Vec<f64> {
    v.iter().map(|p| p.0).collect()
}

fn wrap(v: &[f64]) -> Vec<Prob> {
    v.iter().map(|&p| Prob(p)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    mode: ModelMode,
    query_probs: Vec<Prob>,
    intent_probs: Vec<Vec<Prob>>,
    attributes: Vec<AttributeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeEntry {
    name: String,
    cardinality: usize,
    #[serde(default)]
    bits: Option<u32>,
    #[serde(default)]
    sensitivity: Option<Prob>,
    /// One row per intent (naive Bayes) or a single marginal row.
    table: Vec<Vec<Prob>>,
}

impl ModelFile {
    fn into_model(self) -> Result<JointModel> {
        let attrs = self
            .attributes
            .iter()
            .map(|a| {
                let mut def = AttributeDef::new(a.name.clone(), a.cardinality);
                if let Some(bits) = a.bits {
                    def = def.with_bits(bits);
                }
                if let Some(s) = a.sensitivity {
                    def = def.with_sensitivity(s.0);
                }
                def
            })
            .collect();
        let schema = AttributeSchema::new(attrs)?;
        let query_probs = unwrap(&self.query_probs);
        let intents = self.intent_probs.iter().map(|r| unwrap(r)).collect();
        let tables: Vec<Vec<Vec<f64>>> = self
            .attributes
            .iter()
            .map(|a| a.table.iter().map(|r| unwrap(r)).collect())
            .collect();
        match self.mode {
            ModelMode::NaiveBayes => JointModel::naive_bayes(schema, query_probs, intents, tables),
            ModelMode::IndependentIdentity => {
                let mut marginals = Vec::with_capacity(tables.len());
                for (a, mut t) in self.attributes.iter().zip(tables) {
                    if t.len() != 1 {
                        return Err(Error::Model(format!(
                            "attribute `{}` needs exactly one marginal row",
                            a.name
                        )));
                    }
                    marginals.push(t.remove(0));
                }
                JointModel::independent_identity(schema, marginals, query_probs, intents)
            }
        }
    }

    fn from_model(m: &JointModel) -> Self {
        ModelFile {
            mode: m.mode,
            query_probs: wrap(&m.query_probs),
            intent_probs: m.intent_given_query.iter().map(|r| wrap(r)).collect(),
            attributes: m
                .schema
                .attributes()
                .iter()
                .zip(&m.attr_tables)
                .map(|(a, t)| AttributeEntry {
                    name: a.name.clone(),
                    cardinality: a.cardinality,
                    bits: Some(a.bits),
                    sensitivity: Some(Prob(a.sensitivity)),
                    table: t.iter().map(|r| wrap(r)).collect(),
                })
                .collect(),
        }
    }
}

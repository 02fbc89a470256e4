//! Synthetic event logs and fixture models.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::joint::{JointModel, ModelMode};
use super::log::{EventLog, EventRecord};
use super::schema::{AttributeDef, AttributeSchema};
use crate::error::{Error, Result};

/// Draws `n_records` i.i.d. rows from `model`. The user id of each row is the
/// mixed-radix code of its attribute tuple. Deterministic in `(model, n_records, seed)`.
pub fn generate_synthetic(model: &JointModel, n_records: usize, seed: u64) -> Result<EventLog> {
    if n_records == 0 {
        return Err(Error::InvalidArgument("n_records must be at least 1".into()));
    }
    let weighted = |p: &[f64]| {
        WeightedIndex::new(p).map_err(|e| Error::Model(format!("cannot sample from distribution: {e}")))
    };
    let query_dist = weighted(model.query_probs())?;
    let intent_dists = (0..model.n_queries())
        .map(|q| weighted(model.intent_given_query(q)))
        .collect::<Result<Vec<_>>>()?;
    let attr_rows = match model.mode() {
        ModelMode::NaiveBayes => model.n_intents(),
        ModelMode::IndependentIdentity => 1,
    };
    // attr_dists[i][x]
    let attr_dists = (0..model.schema().len())
        .map(|i| {
            (0..attr_rows)
                .map(|x| weighted(model.attr_row(i, x)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = model.schema().clone();
    let mut records = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        let query = query_dist.sample(&mut rng);
        let intent = intent_dists[query].sample(&mut rng);
        let row = if attr_rows == 1 { 0 } else { intent };
        let values: Vec<u32> = attr_dists
            .iter()
            .map(|d| d[row].sample(&mut rng) as u32)
            .collect();
        records.push(EventRecord {
            user: schema.tuple_code(&values),
            query: query as u32,
            intent: intent as u32,
            values,
        });
    }
    EventLog::new(schema, records)
}

/// A random point on the probability simplex (flat Dirichlet).
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    fix_sum(&mut w);
    w
}

// pushes the rounding residue into the largest entry so the row sums to 1 within an ulp or two
fn fix_sum(w: &mut [f64]) {
    let total: f64 = w.iter().sum();
    if let Some(max) = w
        .iter_mut()
        .max_by(|a, b| a.partial_cmp(b).expect("finite"))
    {
        *max += 1.0 - total;
    }
}

fn fixture_schema(cards: &[usize]) -> AttributeSchema {
    let attrs = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| AttributeDef::new(format!("V{}", i + 1), c))
        .collect();
    AttributeSchema::new(attrs).expect("fixture schema is valid")
}

/// Naive-Bayes model with random parameters over attributes `V1..Vn`.
pub fn random_naive_bayes<R: Rng + ?Sized>(
    rng: &mut R,
    cards: &[usize],
    n_queries: usize,
    n_intents: usize,
) -> JointModel {
    let schema = fixture_schema(cards);
    let queries = random_distribution(rng, n_queries);
    let intents = (0..n_queries).map(|_| random_distribution(rng, n_intents)).collect();
    let tables = cards
        .iter()
        .map(|&c| (0..n_intents).map(|_| random_distribution(rng, c)).collect())
        .collect();
    JointModel::naive_bayes(schema, queries, intents, tables).expect("random model is normalized")
}

/// Independent-identity model with random marginals over attributes `V1..Vn`,
/// one query and `n_intents` intents independent of the attributes.
pub fn random_independent<R: Rng + ?Sized>(rng: &mut R, cards: &[usize], n_intents: usize) -> JointModel {
    let schema = fixture_schema(cards);
    let marginals = cards.iter().map(|&c| random_distribution(rng, c)).collect();
    let intents = vec![random_distribution(rng, n_intents)];
    JointModel::independent_identity(schema, marginals, vec![1.0], intents)
        .expect("random model is normalized")
}

/// Attribute layout of the default synthetic schema: name, cardinality, bits
/// and a synthetic sensitivity level (1 = least sensitive).
const DEFAULT_ATTRIBUTES: &[(&str, usize, u32, u8)] = &[
    ("DGDR", 2, 1, 2),
    ("DAGE", 3, 2, 2),
    ("DOCC", 6, 3, 4),
    ("DREG", 4, 2, 2),
    ("AQRY", 2, 1, 1),
    ("ACLK", 2, 1, 2),
    ("AFRQ", 2, 1, 1),
    ("AZIP", 2, 1, 3),
    ("ACTY", 2, 1, 3),
    ("ACRY", 2, 1, 4),
    ("AWHR", 2, 1, 5),
    ("AWDY", 2, 1, 2),
    ("ATLV", 4, 2, 2),
    ("TART", 2, 1, 2),
    ("TADT", 2, 1, 5),
    ("TBUS", 2, 1, 2),
    ("TCMP", 2, 1, 2),
    ("TGMS", 2, 1, 2),
    ("THEA", 2, 1, 4),
    ("THOM", 2, 1, 2),
    ("TKID", 2, 1, 3),
    ("TNWS", 2, 1, 1),
    ("TREC", 2, 1, 2),
    ("TREF", 2, 1, 1),
    ("TREG", 2, 1, 2),
    ("TSCI", 2, 1, 1),
    ("TSHP", 2, 1, 2),
    ("TCIN", 2, 1, 2),
    ("TSOC", 2, 1, 4),
    ("TSPT", 2, 1, 2),
    ("TWLD", 2, 1, 2),
];

/// Synthetic sensitivity in bits for each level of the default schema.
const LEVEL_SENSITIVITY: [f64; 5] = [0.0, 0.005, 0.01, 0.02, 0.04];

/// The default synthetic schema: 31 coarse demographic, activity and topic
/// attributes, none wider than three bits. Sensitivities are synthetic.
pub fn default_schema() -> AttributeSchema {
    let attrs = DEFAULT_ATTRIBUTES
        .iter()
        .map(|&(name, card, bits, level)| {
            AttributeDef::new(name, card)
                .with_bits(bits)
                .with_sensitivity(LEVEL_SENSITIVITY[level as usize - 1])
        })
        .collect();
    AttributeSchema::new(attrs).expect("default schema is valid")
}

/// Base marginals for the default model; binary attributes list `P(V = 1)`.
fn default_base(name: &str, card: usize) -> Vec<f64> {
    let binary = |p1: f64| vec![1.0 - p1, p1];
    match (name, card) {
        ("DGDR", _) => binary(0.48),
        ("DAGE", _) => vec![0.09, 0.56, 0.35],
        ("DOCC", _) => vec![0.3, 0.2, 0.15, 0.15, 0.1, 0.1],
        ("DREG", _) => vec![0.53, 0.07, 0.03, 0.37],
        ("AQRY", _) => binary(0.7),
        ("ACLK", _) => binary(0.53),
        ("AFRQ", _) => binary(0.47),
        ("AZIP", _) | ("ACTY", _) => binary(0.31),
        ("ACRY", _) => binary(0.02),
        ("AWHR", _) => binary(0.4),
        ("AWDY", _) => binary(0.73),
        ("ATLV", _) => vec![0.5, 0.25, 0.15, 0.1],
        (_, 2) => binary(0.3),
        (_, c) => vec![1.0 / c as f64; c],
    }
}

/// How strongly an attribute's distribution shifts with the intent.
fn default_informativeness(name: &str) -> f64 {
    match name {
        "DOCC" | "ATLV" => 2.0,
        "DAGE" | "ACTY" | "AQRY" | "ACLK" => 1.5,
        n if n.starts_with('D') => 1.0,
        n if n.starts_with('A') => 0.8,
        _ => 0.6,
    }
}

/// Default synthetic naive-Bayes model over [`default_schema`]: 16 queries,
/// 12 intents, attribute conditionals perturbed around coarse base rates.
/// Fixed internal seed, so the model is identical on every call.
pub fn default_model() -> JointModel {
    const QUERIES: usize = 16;
    const INTENTS: usize = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2008);
    let schema = default_schema();
    let queries = random_distribution(&mut rng, QUERIES);
    let intents = (0..QUERIES)
        .map(|_| {
            // each query concentrates on a few intents
            let mut row: Vec<f64> = (0..INTENTS).map(|_| 0.02).collect();
            for _ in 0..4 {
                let x = rng.random_range(0..INTENTS);
                row[x] += -(1.0 - rng.random::<f64>()).ln();
            }
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= total);
            fix_sum(&mut row);
            row
        })
        .collect();
    let tables = schema
        .attributes()
        .iter()
        .map(|a| {
            let base = default_base(&a.name, a.cardinality);
            let scale = default_informativeness(&a.name);
            (0..INTENTS)
                .map(|_| {
                    let mut row: Vec<f64> = base
                        .iter()
                        .map(|b| b * (scale * (2.0 * rng.random::<f64>() - 1.0)).exp())
                        .collect();
                    let total: f64 = row.iter().sum();
                    row.iter_mut().for_each(|v| *v /= total);
                    fix_sum(&mut row);
                    row
                })
                .collect()
        })
        .collect();
    JointModel::naive_bayes(schema, queries, intents, tables).expect("default model is normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_records_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_independent(&mut rng, &[2], 2);
        assert!(matches!(generate_synthetic(&m, 0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_naive_bayes(&mut rng, &[2, 3, 2], 2, 4);
        let a = generate_synthetic(&m, 500, 42).unwrap();
        let b = generate_synthetic(&m, 500, 42).unwrap();
        let c = generate_synthetic(&m, 500, 43).unwrap();
        assert_eq!(a.records(), b.records());
        assert_ne!(a.records(), c.records());
    }

    #[test]
    fn user_is_tuple_code() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_naive_bayes(&mut rng, &[3, 2], 1, 3);
        let log = generate_synthetic(&m, 50, 9).unwrap();
        for r in log.records() {
            assert_eq!(log.schema().decode_tuple(r.user), r.values);
        }
    }

    #[test]
    fn default_schema_shape() {
        let s = default_schema();
        assert_eq!(s.len(), 31);
        assert!(s.attributes().iter().all(|a| a.bits <= 3));
        assert_eq!(s.attributes().iter().map(|a| a.bits).sum::<u32>(), 36);
        let m = default_model();
        assert_eq!(m.schema(), &s);
        assert_eq!(m.to_json(), default_model().to_json());
    }

    #[test]
    fn random_distributions_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in 1..10 {
            let d = random_distribution(&mut rng, len);
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(d.iter().all(|&p| p > 0.0));
        }
    }
}

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tradeopt_core::model::*;
use tradeopt_core::objectives::{CostMetric, ObjectiveSpec};
use tradeopt_core::optimize::{greedy, ObjectiveKind};

fn schema(cards: &[usize]) -> AttributeSchema {
    AttributeSchema::new(
        cards
            .iter()
            .enumerate()
            .map(|(i, &c)| AttributeDef::new(format!("V{}", i + 1), c))
            .collect(),
    )
    .unwrap()
}

fn csv_bytes(log: &EventLog) -> Vec<u8> {
    let mut out = Vec::new();
    write_log(log, &mut out).unwrap();
    out
}

#[test]
fn generation_is_deterministic() {
    let model = random_naive_bayes(&mut ChaCha8Rng::seed_from_u64(1), &[2, 3, 2], 2, 3);
    let a = csv_bytes(&generate_synthetic(&model, 500, 7).unwrap());
    let b = csv_bytes(&generate_synthetic(&model, 500, 7).unwrap());
    let c = csv_bytes(&generate_synthetic(&model, 500, 8).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(generate_synthetic(&model, 0, 7).is_err());
}

#[test]
fn written_logs_round_trip() {
    let model = random_naive_bayes(&mut ChaCha8Rng::seed_from_u64(2), &[3, 2], 3, 4);
    let text = csv_bytes(&generate_synthetic(&model, 300, 1).unwrap());
    let reloaded = load_log(text.as_slice(), model.schema()).unwrap();
    assert_eq!(csv_bytes(&reloaded), text);
}

#[test]
fn independent_marginal_mean() {
    let model = JointModel::independent_marginals(schema(&[2]), vec![vec![0.4, 0.6]]).unwrap();
    let log = generate_synthetic(&model, 100_000, 42).unwrap();
    let mean = log.records().iter().map(|r| r.values[0] as f64).sum::<f64>() / log.len() as f64;
    assert!((mean - 0.6).abs() < 0.01, "mean {mean}");
}

#[test]
fn independent_frequencies_within_four_sigma() {
    let model = random_independent(&mut ChaCha8Rng::seed_from_u64(9), &[2, 3, 4], 2);
    let n = 2000;
    let mut good = 0;
    for seed in 0..100 {
        let log = generate_synthetic(&model, n, seed).unwrap();
        let mut all = true;
        for i in 0..3 {
            let marginal = model.attr_marginal(i);
            for (v, &p) in marginal.iter().enumerate() {
                let freq = log.records().iter().filter(|r| r.values[i] as usize == v).count() as f64 / n as f64;
                all &= (freq - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt();
            }
        }
        good += all as usize;
    }
    assert!(good >= 99, "{good}/100 seeds within 4 sigma");
}

/// Plug-in estimate of I(V1; V2 | X) in bits.
fn conditional_mutual_information(log: &EventLog) -> f64 {
    let mut xab: HashMap<(u32, u32, u32), f64> = HashMap::new();
    let mut xa: HashMap<(u32, u32), f64> = HashMap::new();
    let mut xb: HashMap<(u32, u32), f64> = HashMap::new();
    let mut x: HashMap<u32, f64> = HashMap::new();
    for r in log.records() {
        *xab.entry((r.intent, r.values[0], r.values[1])).or_default() += 1.0;
        *xa.entry((r.intent, r.values[0])).or_default() += 1.0;
        *xb.entry((r.intent, r.values[1])).or_default() += 1.0;
        *x.entry(r.intent).or_default() += 1.0;
    }
    let n = log.len() as f64;
    xab.iter()
        .map(|(&(i, a, b), &c)| c / n * (c * x[&i] / (xa[&(i, a)] * xb[&(i, b)])).log2())
        .sum()
}

#[test]
fn naive_bayes_attributes_conditionally_independent() {
    let model = random_naive_bayes(&mut ChaCha8Rng::seed_from_u64(3), &[2, 3], 2, 4);
    let log = generate_synthetic(&model, 50_000, 5).unwrap();
    let cmi = conditional_mutual_information(&log);
    assert!(cmi < 0.01, "cmi {cmi}");
}

#[test]
fn default_schema_shape() {
    let s = default_schema();
    assert_eq!(s.len(), 31);
    assert!(s.attributes().iter().all(|a| a.bits <= 3));
    assert!(s.attributes().iter().filter(|a| a.cardinality == 2).count() > 20);
    let m = default_model();
    assert_eq!(m.schema(), &s);
    assert_eq!((m.n_queries(), m.n_intents()), (16, 12));
}

// shape checks run on maximum-likelihood estimates of a 20k-row sample
fn default_objective(metric: CostMetric) -> tradeopt_core::Objective {
    let log = generate_synthetic(&default_model(), 20_000, 1).unwrap();
    ObjectiveSpec::exact_log(Arc::new(log))
        .smoothing(SmoothingConfig::none())
        .metric(metric)
        .build()
        .unwrap()
}

fn increments(values: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    values
        .iter()
        .map(|&v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect()
}

const SHAPE_TOLERANCE: f64 = 2.0 * 0.02;

#[test]
fn default_utility_trace_is_concave() {
    let obj = default_objective(CostMetric::MaxProb);
    let trace = greedy(&obj, ObjectiveKind::UtilityOnly, 31).unwrap();
    let inc = increments(&trace.incremental_values);
    for w in inc.windows(2) {
        assert!(w[1] <= w[0] + SHAPE_TOLERANCE, "{inc:?}");
    }
    assert!(trace.incremental_values[30] > 1.0);
}

#[test]
fn default_cost_traces() {
    let obj = default_objective(CostMetric::MaxProb);
    let trace = greedy(&obj, ObjectiveKind::CostOnlyMin, 31).unwrap();
    let inc = increments(&trace.incremental_values[1..]);
    for w in inc.windows(2) {
        assert!(w[1] >= w[0] - SHAPE_TOLERANCE, "{inc:?}");
    }

    let kanon = default_objective(CostMetric::kanon(10).unwrap());
    let values: Vec<f64> = greedy(&kanon, ObjectiveKind::CostOnlyMin, 31)
        .unwrap()
        .order
        .iter()
        .scan(AttrSet::empty(), |set, &v| {
            set.insert(v);
            Some(kanon.identifiability(*set).unwrap())
        })
        .collect();
    let ceiling = values[30];
    let inc = increments(&values);
    let peak = inc.iter().cloned().fold(0.0, f64::max);
    let saturated = values.iter().position(|&v| v >= 0.95 * ceiling).unwrap();
    assert!(saturated < 30);
    assert!(inc[saturated + 1..].iter().all(|&d| d <= 0.25 * peak), "{values:?}");
}

#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use tradeopt_core::model::{random_independent, random_naive_bayes, AttrSet, JointModel};
use tradeopt_core::objectives::{Objective, ObjectiveSpec};

pub fn cards<R: Rng>(rng: &mut R, n: usize, max_card: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(2..=max_card)).collect()
}

pub fn nb_model<R: Rng>(rng: &mut R, n: usize) -> JointModel {
    let c = cards(rng, n, 3);
    let nq = rng.random_range(1..=3);
    let nx = rng.random_range(2..=6);
    random_naive_bayes(rng, &c, nq, nx)
}

pub fn independent_model<R: Rng>(rng: &mut R, n: usize, max_card: usize) -> JointModel {
    let c = cards(rng, n, max_card);
    random_independent(rng, &c, 2)
}

pub fn exact(model: JointModel, lambda: f64) -> Objective {
    ObjectiveSpec::exact_model(Arc::new(model))
        .lambda(lambda)
        .build()
        .unwrap()
}

/// Maximum of `F` by direct enumeration through `evaluate`.
pub fn brute_max(obj: &Objective) -> (AttrSet, f64) {
    obj.candidates()
        .subsets()
        .map(|s| (s, obj.evaluate(s).unwrap().objective))
        .fold((AttrSet::empty(), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

/// Every (A, B, v) with A subset of B and v outside B, over `universe`.
pub fn chain_triples(universe: AttrSet) -> Vec<(AttrSet, AttrSet, usize)> {
    let mut out = Vec::new();
    for b in universe.subsets() {
        for a in b.subsets() {
            for v in universe.difference(b).iter() {
                out.push((a, b, v));
            }
        }
    }
    out
}

/// Joint probability of every full attribute tuple, enumerated straight from
/// the model parameters (attribute 0 varies fastest).
pub fn tuple_table(model: &JointModel) -> Vec<(Vec<usize>, f64)> {
    let cards = model.schema().cardinalities();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for &c in &cards {
        tuples = tuples
            .into_iter()
            .flat_map(|t| (0..c).map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    tuples
        .into_iter()
        .map(|t| {
            let mut p = 0.0;
            for (q, pq) in model.query_probs().iter().enumerate() {
                for (x, px) in model.intent_given_query(q).iter().enumerate() {
                    p += pq * px * t.iter().enumerate().map(|(i, &v)| model.attr_prob(i, x, v)).product::<f64>();
                }
            }
            (t, p)
        })
        .collect()
}

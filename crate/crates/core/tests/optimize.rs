mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tradeopt_core::model::{AttrSet, AttributeDef, AttributeSchema, JointModel};
use tradeopt_core::objectives::{CostMetric, ObjectiveSpec};
use tradeopt_core::optimize::*;
use tradeopt_core::Error;

use common::*;

fn two_attribute_model() -> JointModel {
    let schema = AttributeSchema::new(vec![AttributeDef::new("V1", 4), AttributeDef::new("V2", 2)]).unwrap();
    let determines: Vec<Vec<f64>> = (0..4).map(|x| (0..4).map(|v| if v == x { 1.0 } else { 0.0 }).collect()).collect();
    let noise = vec![vec![0.5, 0.5]; 4];
    JointModel::naive_bayes(schema, vec![1.0], vec![vec![0.25; 4]], vec![determines, noise]).unwrap()
}

#[test]
fn greedy_utility_order() {
    let obj = exact(two_attribute_model(), 0.0);
    for trace in [
        greedy(&obj, ObjectiveKind::UtilityOnly, 2).unwrap(),
        lazy_greedy(&obj, ObjectiveKind::UtilityOnly, 2).unwrap(),
    ] {
        assert_eq!(trace.order, vec![0, 1]);
        assert!((trace.incremental_values[0] - 2.0).abs() < 1e-12);
        assert!((trace.incremental_values[1] - 2.0).abs() < 1e-12);
    }
    assert!(greedy(&obj, ObjectiveKind::UtilityOnly, 0).unwrap().order.is_empty());
    assert!(greedy(&obj, ObjectiveKind::UtilityOnly, 3).is_err());
}

#[test]
fn greedy_never_stops_early() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let obj = exact(nb_model(&mut rng, 4), 1e6);
    let trace = greedy(&obj, ObjectiveKind::Full, 4).unwrap();
    assert_eq!(trace.order.len(), 4);
    assert!(trace.incremental_values.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn lazy_saves_evaluations() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let obj = exact(nb_model(&mut rng, 10), 0.0);
    let eager = greedy(&obj, ObjectiveKind::UtilityOnly, 10).unwrap();
    let lazy = lazy_greedy(&obj, ObjectiveKind::UtilityOnly, 10).unwrap();
    assert_eq!(eager.order, lazy.order);
    assert!(lazy.eval_count < eager.eval_count, "{} vs {}", lazy.eval_count, eager.eval_count);
    assert_eq!(eager.eval_count, 55);
    let one_eager = greedy(&obj, ObjectiveKind::UtilityOnly, 1).unwrap();
    let one_lazy = lazy_greedy(&obj, ObjectiveKind::UtilityOnly, 1).unwrap();
    assert_eq!((one_eager.eval_count, one_lazy.eval_count), (10, 10));
}

#[test]
fn lls_modular_example() {
    let w = [1.0, 2.0, -1.0];
    let f = from_fn(AttrSet::full(3), |s: AttrSet| s.iter().map(|i| w[i]).sum());
    let out = lls_search(&f, &LlsConfig::new(0.01).unwrap()).unwrap();
    assert_eq!(out.chosen, AttrSet::from_indices([0, 1]));
    assert_eq!(out.value, 3.0);
    let ex = exhaustive_search(&f, 20).unwrap();
    assert_eq!((ex.chosen, ex.value), (out.chosen, 3.0));
}

#[test]
fn lls_single_attribute() {
    let obj = exact(two_attribute_model().restrict(AttrSet::singleton(0)).unwrap(), 0.0);
    assert_eq!(lls(&obj, &LlsConfig::default()).unwrap().chosen, AttrSet::singleton(0));
}

#[test]
fn exhaustive_extremes() {
    let obj = exact(two_attribute_model(), 0.0);
    // V2 adds nothing, so the smallest maximizer is {V1}
    assert_eq!(exhaustive(&obj, 20).unwrap().chosen, AttrSet::singleton(0));
    let heavy = obj.with_lambda(1e6).unwrap();
    assert_eq!(exhaustive(&heavy, 20).unwrap().chosen, AttrSet::empty());
    assert!(matches!(exhaustive(&obj, 1), Err(Error::UniverseTooLarge { .. })));
}

#[test]
fn bound_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let model = nb_model(&mut rng, 4);
    let full = AttrSet::full(4);
    // k = 1 costs nothing, so the bound around the full set is exactly U(V)
    let free = ObjectiveSpec::exact_model(Arc::new(model.clone()))
        .metric(CostMetric::kanon(1).unwrap())
        .lambda(3.0)
        .build()
        .unwrap();
    assert_eq!(online_bound(&free, full).unwrap(), free.utility(full).unwrap());
    let obj = exact(model, 0.0);
    let sum: f64 = (0..4).map(|i| obj.utility(AttrSet::singleton(i)).unwrap().max(0.0)).sum();
    assert!((online_bound(&obj, AttrSet::empty()).unwrap() - sum).abs() < 1e-12);
    let priced = obj.with_lambda(2.0).unwrap();
    let b = online_bound(&priced, full).unwrap();
    assert!(b <= priced.utility(full).unwrap());
    assert!(b >= brute_max(&priced).1 - 1e-9);
}

#[test]
fn constrained_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let obj = exact(nb_model(&mut rng, 5), 0.0);
    let opts = SolveOptions::with_algorithm(Algorithm::Exhaustive);
    let full_cost = obj.total_cost(AttrSet::full(5)).unwrap();
    let r = constrained_max_utility(&obj, full_cost, &opts).unwrap();
    assert_eq!(r.selection.chosen, exhaustive(&obj, 20).unwrap().chosen);
    let floor = obj.identifiability(AttrSet::empty()).unwrap();
    assert!(matches!(
        constrained_max_utility(&obj, floor * 0.5, &opts),
        Err(Error::Infeasible { .. })
    ));
}

#[test]
fn normalized_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let obj = exact(nb_model(&mut rng, 6), 2.0);
    let norm = normalize_objective(&obj);
    assert_eq!(norm.value(AttrSet::full(6)), 0.0);
    assert_eq!(
        exhaustive_search(&norm, 20).unwrap().chosen,
        exhaustive_search(&obj, 20).unwrap().chosen
    );
}

#[test]
fn sweep_rejects_bad_grids() {
    let obj = exact(two_attribute_model(), 0.0);
    let opts = SolveOptions::default();
    assert!(sweep_lambda(&obj, &[], &opts).is_err());
    assert!(sweep_lambda(&obj, &[1.0, 1.0], &opts).is_err());
    assert!(sweep_lambda(&obj, &[-1.0, 1.0], &opts).is_err());
    let curve = sweep_lambda(&obj, &[0.0], &SolveOptions::with_algorithm(Algorithm::Exhaustive)).unwrap();
    assert_eq!(curve.points[0].selection.chosen, exhaustive(&obj, 20).unwrap().chosen);
    let mut csv = Vec::new();
    curve.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("lambda,attrs,utility_bits,identifiability,sensitivity_bits,objective,upper_bound,eval_count\n0,V1,"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn greedy_meets_cardinality_guarantee(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=8);
        let obj = exact(nb_model(&mut rng, n), 0.0);
        let k = rng.random_range(1..=n.min(4));
        let trace = greedy(&obj, ObjectiveKind::UtilityOnly, k).unwrap();
        let best = AttrSet::full(n)
            .subsets()
            .filter(|s| s.len() == k)
            .map(|s| obj.utility(s).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let got = trace.incremental_values[k - 1];
        prop_assert!(got >= (1.0 - (-1.0f64).exp()) * best - 1e-9);
    }

    #[test]
    fn lazy_matches_eager(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=9);
        let obj = exact(nb_model(&mut rng, n), 0.0);
        let eager = greedy(&obj, ObjectiveKind::UtilityOnly, n).unwrap();
        let lazy = lazy_greedy(&obj, ObjectiveKind::UtilityOnly, n).unwrap();
        prop_assert_eq!(&eager.order, &lazy.order);
        prop_assert_eq!(&eager.incremental_values, &lazy.incremental_values);
        prop_assert!(lazy.eval_count <= eager.eval_count);
    }

    #[test]
    fn lls_approximation_and_budget(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=8);
        let lambda = rng.random_range(0.0..10.0);
        let obj = exact(nb_model(&mut rng, n), lambda);
        let config = LlsConfig::default();
        let sel = lls(&obj, &config).unwrap();
        let (_, opt) = brute_max(&obj);
        if opt >= 0.0 {
            prop_assert!(sel.evaluation.objective >= (1.0 / 3.0 - config.epsilon / n as f64) * opt - 1e-12);
        }
        let nf = n as f64;
        prop_assert!((sel.eval_count as f64) <= (1.0 / config.epsilon) * nf.powi(3) * (nf + 1.0).log2());
    }

    #[test]
    fn bound_dominates_optimum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let lambda = rng.random_range(0.0..10.0);
        let obj = exact(nb_model(&mut rng, n), lambda);
        let (_, opt) = brute_max(&obj);
        let full = AttrSet::full(n);
        for reference in full.subsets() {
            prop_assert!(online_bound(&obj, reference).unwrap() >= opt - 1e-9);
        }
        let sel = lls(&obj, &LlsConfig::default()).unwrap();
        prop_assert!(online_bound(&obj, sel.chosen).unwrap() >= sel.evaluation.objective - 1e-9);
    }

    #[test]
    fn exhaustive_sweep_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=6);
        let obj = exact(nb_model(&mut rng, n), 0.0);
        let grid: Vec<f64> = (0..12).map(|i| 0.01 * 2f64.powi(i)).collect();
        let curve = sweep_lambda(&obj, &grid, &SolveOptions::with_algorithm(Algorithm::Exhaustive)).unwrap();
        for w in curve.points.windows(2) {
            let (a, b) = (&w[0].selection.evaluation, &w[1].selection.evaluation);
            prop_assert!(b.utility <= a.utility + 1e-9);
            prop_assert!(b.cost <= a.cost + 1e-9);
        }
    }

    #[test]
    fn constrained_never_beats_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=6);
        let obj = exact(nb_model(&mut rng, n), 0.0);
        let lo = obj.total_cost(AttrSet::empty()).unwrap();
        let hi = obj.total_cost(AttrSet::full(n)).unwrap();
        let budget = rng.random_range(lo..=hi);
        let r = constrained_max_utility(&obj, budget, &SolveOptions::with_algorithm(Algorithm::Exhaustive)).unwrap();
        let direct = r.direct_optimum.unwrap();
        prop_assert!(r.selection.evaluation.cost <= budget);
        prop_assert!(r.selection.evaluation.utility <= direct.evaluation.utility + 1e-12);
    }

    #[test]
    fn normalization_keeps_argmax(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=8);
        let lambda = rng.random_range(0.0..10.0);
        let obj = exact(nb_model(&mut rng, n), lambda);
        let norm = normalize_objective(&obj);
        let a = exhaustive_search(&norm, 20).unwrap().chosen;
        let b = exhaustive_search(&obj, 20).unwrap().chosen;
        prop_assert!((obj.value(a) - obj.value(b)).abs() < 1e-9);
    }
}

//! Utility, identifiability and sensitivity costs, and sample-size planning.

mod entropy;
mod metric;
mod objective;
mod sampling;

pub use entropy::{entropy_bits, smoothed_entropy};
pub use metric::{CostMetric, RESCALED_CLIP};
pub use objective::{DataSource, EvalMode, Evaluation, Objective, ObjectiveSpec};
pub use sampling::{
    sample_size_cost, sample_size_utility, subset_seed, SampleCount, SamplingPlan, DEFAULT_SAMPLES,
};

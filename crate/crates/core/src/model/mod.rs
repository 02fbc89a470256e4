//! Attribute schemas, event logs, exact joint models and the synthetic generator.

mod empirical;
mod generate;
mod joint;
mod log;
mod schema;

pub use empirical::{empirical_joint, EmpiricalJoint, SmoothingConfig};
pub use generate::{
    default_model, default_schema, generate_synthetic, random_distribution, random_independent,
    random_naive_bayes,
};
pub(crate) use joint::increment as joint_increment;
pub use joint::{JointModel, ModelMode, DEFAULT_ENUMERATION_LIMIT, NORMALIZATION_TOLERANCE};
pub use log::{infer_schema, load_log, write_log, EventLog, EventRecord};
pub use schema::{min_bits, AttrSet, AttributeDef, AttributeSchema, MAX_ATTRIBUTES};

//! Choosing which personal attributes to share by trading utility (entropy
//! reduction of the intent) against identifiability and sensitivity cost.

pub mod calibrate;
pub mod error;
pub mod model;
pub mod objectives;
pub mod optimize;

pub use error::{Error, Result};
pub use model::{AttrSet, AttributeDef, AttributeSchema, EventLog, EventRecord, JointModel, ModelMode, SmoothingConfig};
pub use objectives::{CostMetric, DataSource, EvalMode, Evaluation, Objective, ObjectiveSpec, SamplingPlan};
pub use optimize::{LlsConfig, Selection, TradeoffCurve};

/// Library version embedded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Loading inputs and assembling the objective a command works on.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};
use tradeopt_core::calibrate::{apply_sensitivities, read_sensitivity_table};
use tradeopt_core::model::{default_schema, infer_schema, load_log, AttrSet, AttributeSchema, EventLog, JointModel};
use tradeopt_core::objectives::{CostMetric, Objective, ObjectiveSpec, SamplingPlan, DEFAULT_SAMPLES};
use tradeopt_core::{Error, SmoothingConfig};

use crate::output::sha256_hex;

/// Largest attribute-pattern space allowed for exact evaluation of a log.
pub const EXACT_PATTERN_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Event log CSV (user,query,intent,<attributes>).
    #[arg(long, conflicts_with = "model")]
    pub log: Option<PathBuf>,
    /// Joint model JSON, evaluated exactly.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Sensitivity table CSV (attribute,sensitivity_bits); `never` excludes an attribute.
    #[arg(long)]
    pub sens: Option<PathBuf>,
    /// Identifiability loss: maxprob, rescaled or kanon:K.
    #[arg(long, default_value = "maxprob")]
    pub metric: CostMetric,
    /// Dirichlet pseudocount per outcome cell for log estimates.
    #[arg(long, default_value_t = SmoothingConfig::DEFAULT_PSEUDOCOUNT)]
    pub alpha: f64,
    /// Evaluate a log by full enumeration instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Rows sampled per estimate (default 1000).
    #[arg(long, conflicts_with_all = ["exact", "eps"])]
    pub samples: Option<usize>,
    /// Target absolute error; the sample count follows from the Hoeffding bounds.
    #[arg(long, requires = "delta", conflicts_with = "exact")]
    pub eps: Option<f64>,
    /// Failure probability for --eps.
    #[arg(long, requires = "eps")]
    pub delta: Option<f64>,
    /// Sampling seed.
    #[arg(long, env = "TRADEOPT_SEED")]
    pub seed: Option<u64>,
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn describe(path: &Path, bytes: &[u8]) -> Value {
    json!({ "path": path.display().to_string(), "sha256": sha256_hex(bytes) })
}

/// Default schema when the header lists exactly its attributes, else inferred from the data.
fn log_schema(bytes: &[u8]) -> Result<AttributeSchema> {
    let default = default_schema();
    let header = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let header = String::from_utf8_lossy(header);
    let mut cols: Vec<&str> = header.trim_end_matches('\r').split(',').map(str::trim).collect();
    if cols.len() > 3 {
        let mut attrs = cols.split_off(3);
        let mut names = default.names(default.full_set());
        attrs.sort_unstable();
        names.sort_unstable();
        if attrs == names {
            return Ok(default);
        }
    }
    Ok(infer_schema(bytes)?)
}

pub enum Source {
    Model(JointModel),
    Log(EventLog),
}

impl Source {
    fn schema(&self) -> &AttributeSchema {
        match self {
            Source::Model(m) => m.schema(),
            Source::Log(l) => l.schema(),
        }
    }
}

pub struct Prepared {
    pub objective: Objective,
    /// Paths and digests of every input file.
    pub inputs: Value,
    pub seed: Option<u64>,
}

impl DataArgs {
    /// Loads the data, applies sensitivities, and builds the objective over
    /// `restrict` (all candidates when `None`).
    pub fn prepare(&self, lambda: f64, restrict: &[String]) -> Result<Prepared> {
        let mut inputs = serde_json::Map::new();
        let mut source = match (&self.log, &self.model) {
            (Some(path), None) => {
                let bytes = read_input(path)?;
                inputs.insert("log".into(), describe(path, &bytes));
                let schema = log_schema(&bytes)?;
                Source::Log(load_log(bytes.as_slice(), &schema).with_context(|| format!("in {}", path.display()))?)
            }
            (None, Some(path)) => {
                let bytes = read_input(path)?;
                inputs.insert("model".into(), describe(path, &bytes));
                let text = String::from_utf8(bytes).context("model file is not UTF-8")?;
                if self.samples.is_some() || self.eps.is_some() {
                    bail!("sampled evaluation needs --log; models are evaluated exactly");
                }
                Source::Model(JointModel::from_json(&text).with_context(|| format!("in {}", path.display()))?)
            }
            _ => bail!("exactly one of --log or --model is required"),
        };

        let mut candidates = source.schema().full_set();
        if let Some(path) = &self.sens {
            let bytes = read_input(path)?;
            inputs.insert("sens".into(), describe(path, &bytes));
            let table = read_sensitivity_table(bytes.as_slice()).with_context(|| format!("in {}", path.display()))?;
            let (schema, allowed) = apply_sensitivities(source.schema(), &table)?;
            candidates = allowed;
            source = match source {
                Source::Model(m) => Source::Model(m.with_schema(schema)?),
                Source::Log(l) => Source::Log(l.with_schema(schema)?),
            };
        }
        if !restrict.is_empty() {
            candidates = candidates.intersection(parse_attrs(source.schema(), restrict)?);
        }

        let smoothing = SmoothingConfig::new(self.alpha)?;
        let mut seed = None;
        let spec = match source {
            Source::Model(m) => ObjectiveSpec::exact_model(Arc::new(m)),
            Source::Log(log) if self.exact => {
                let cells = log.schema().pattern_count(candidates);
                if cells > EXACT_PATTERN_LIMIT {
                    return Err(Error::EnumerationLimit {
                        cells,
                        limit: EXACT_PATTERN_LIMIT,
                    }
                    .into());
                }
                ObjectiveSpec::exact_log(Arc::new(log))
            }
            Source::Log(log) => {
                let Some(s) = self.seed else {
                    bail!("sampled evaluation requires --seed or TRADEOPT_SEED");
                };
                seed = Some(s);
                let plan = match (self.eps, self.delta) {
                    (Some(e), Some(d)) => SamplingPlan::accuracy(e, d, s),
                    _ => SamplingPlan::fixed(self.samples.unwrap_or(DEFAULT_SAMPLES), s),
                };
                ObjectiveSpec::sampled_log(Arc::new(log), plan)
            }
        };
        let sensitivities = spec.schema().sensitivities();
        let objective = spec
            .metric(self.metric)
            .smoothing(smoothing)
            .sensitivities(sensitivities)
            .candidates(candidates)
            .lambda(lambda)
            .build()?;
        Ok(Prepared {
            objective,
            inputs: Value::Object(inputs),
            seed,
        })
    }
}

/// Union of `+`- or `,`-separated attribute lists.
pub fn parse_attrs(schema: &AttributeSchema, values: &[String]) -> Result<AttrSet> {
    let mut set = AttrSet::empty();
    for v in values {
        set = set.union(schema.parse_subset(v)?);
    }
    Ok(set)
}

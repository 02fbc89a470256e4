//! `tradeopt`: choose which user attributes to share with a personalization service.

mod data;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use tradeopt_core::calibrate::{
    fit_lambda, fit_lambda_with_intercept, level_bits, read_attribute_levels, read_granularity, read_speedups,
    sensitivity_to_bits, write_sensitivity_table,
};
use tradeopt_core::model::{default_model, AttrSet, generate_synthetic, write_log, JointModel};
use tradeopt_core::optimize::{
    constrained_max_utility, greedy, lazy_greedy, online_bound, solve, sweep_lambda, Algorithm, ObjectiveKind,
    SolveOptions, DEFAULT_EXHAUSTIVE_LIMIT,
};
use tradeopt_core::{Error, LlsConfig, Objective};

use data::{parse_attrs, read_input, DataArgs};
use output::{emit, emit_csv, RunMeta};

#[derive(Parser)]
#[command(name = "tradeopt", version, about = "Utility/privacy trade-offs for attribute sharing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic event log from a joint model.
    Gen(GenArgs),
    /// Evaluate utility, identifiability, sensitivity and the objective for one set.
    Estimate(EstimateArgs),
    /// Pick the set maximizing the objective, or utility under a cost budget.
    Optimize(OptimizeArgs),
    /// Optimize over a grid of lambda values and write the trade-off curve.
    Sweep(SweepArgs),
    /// Online upper bound on the optimum around a reference set.
    Bound(BoundArgs),
    /// Fit lambda and per-attribute sensitivities from survey data.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum AlgoArg {
    Greedy,
    Lazy,
    Lls,
    Exhaustive,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Greedy => Algorithm::Greedy,
            AlgoArg::Lazy => Algorithm::Lazy,
            AlgoArg::Lls => Algorithm::Lls,
            AlgoArg::Exhaustive => Algorithm::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    /// Maximize utility alone.
    Utility,
    /// Minimize total cost alone.
    Cost,
    /// Maximize utility minus lambda times cost.
    Full,
}

impl From<KindArg> for ObjectiveKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Utility => ObjectiveKind::UtilityOnly,
            KindArg::Cost => ObjectiveKind::CostOnlyMin,
            KindArg::Full => ObjectiveKind::Full,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = AlgoArg::Lls)]
    algo: AlgoArg,
    /// Improvement threshold of local search.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Cap on local search rounds (default 2n).
    #[arg(long)]
    max_passes: Option<usize>,
    /// Largest candidate set the exhaustive search accepts.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
    limit: usize,
}

impl SolverArgs {
    fn options(&self) -> Result<SolveOptions> {
        let lls = LlsConfig {
            epsilon: self.epsilon,
            max_passes: self.max_passes,
        };
        lls.validate()?;
        Ok(SolveOptions {
            algorithm: self.algo.into(),
            lls,
            exhaustive_limit: self.limit,
        })
    }
}

#[derive(Debug, Args, Serialize)]
struct GenArgs {
    /// Joint model JSON (the built-in default model when omitted).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of records.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, env = "TRADEOPT_SEED")]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Attribute set to evaluate, e.g. `age+gender`; repeatable, empty for none.
    #[arg(long)]
    attrs: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct OptimizeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Restrict the candidates to these attributes; repeatable.
    #[arg(long)]
    attrs: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Maximize utility subject to total cost at most this value.
    #[arg(long, conflicts_with = "objective")]
    budget: Option<f64>,
    /// Greedy trace of a single objective instead of a full optimization.
    #[arg(long, value_enum, requires = "k")]
    objective: Option<KindArg>,
    /// Steps of the greedy trace.
    #[arg(long, requires = "objective")]
    k: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Restrict the candidates to these attributes; repeatable.
    #[arg(long)]
    attrs: Vec<String>,
    /// `log:a:b:n`, `lin:a:b:n` or a comma-separated list of lambdas.
    #[arg(long)]
    grid: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BoundArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Restrict the candidates to these attributes; repeatable.
    #[arg(long)]
    attrs: Vec<String>,
    /// Reference set the bound is taken around; empty for none.
    #[arg(long = "ref", default_value = "")]
    reference: String,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CalibrateArgs {
    /// Granularity survey CSV: label,cost,bits.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Fit an intercept as well as the slope.
    #[arg(long)]
    intercept: bool,
    /// Required-speedup responses CSV: level,speedup.
    #[arg(long, requires = "levels")]
    speedups: Option<PathBuf>,
    /// Attribute sensitivity levels CSV: attribute,level.
    #[arg(long, requires = "speedups")]
    levels: Option<PathBuf>,
    /// Also write the sensitivity table as CSV here.
    #[arg(long, requires = "speedups")]
    #[serde(skip)]
    sens_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn config_with_inputs<T: Serialize>(args: &T, inputs: Value) -> Result<Value> {
    let mut config = serde_json::to_value(args)?;
    if let Value::Object(map) = &mut config {
        map.insert("inputs".into(), inputs);
    }
    Ok(config)
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        [kind @ ("log" | "lin"), a, b, n] => {
            let a: f64 = a.parse().with_context(|| format!("bad grid start `{a}`"))?;
            let b: f64 = b.parse().with_context(|| format!("bad grid end `{b}`"))?;
            let n: usize = n.parse().with_context(|| format!("bad grid size `{n}`"))?;
            if n == 0 || !(a.is_finite() && b.is_finite()) {
                bail!("grid needs finite endpoints and at least one point");
            }
            if *kind == "log" && !(a > 0.0 && b > 0.0) {
                bail!("log grid endpoints must be positive");
            }
            let at = |i: usize| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if *kind == "log" {
                    (a.ln() + t * (b.ln() - a.ln())).exp()
                } else {
                    a + t * (b - a)
                }
            };
            Ok((0..n).map(at).collect())
        }
        [list] => list
            .split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad lambda `{s}`")))
            .collect(),
        _ => bail!("grid must be log:a:b:n, lin:a:b:n or a comma-separated list"),
    }
}

fn run_gen(args: &GenArgs) -> Result<()> {
    let (model, inputs) = match &args.model {
        Some(path) => {
            let bytes = read_input(path)?;
            let text = String::from_utf8(bytes.clone()).context("model file is not UTF-8")?;
            let model = JointModel::from_json(&text).with_context(|| format!("in {}", path.display()))?;
            let inputs = json!({ "model": { "path": path.display().to_string(), "sha256": output::sha256_hex(&bytes) } });
            (model, inputs)
        }
        None => (default_model(), json!({ "model": "default" })),
    };
    let n = usize::try_from(args.n).context("record count too large")?;
    let log = generate_synthetic(&model, n, args.seed)?;
    let mut csv = Vec::new();
    write_log(&log, &mut csv)?;
    let meta = RunMeta::new("gen", Some(args.seed), config_with_inputs(args, inputs)?);
    emit_csv(args.out.as_deref(), &csv, &meta)?;
    let dest = args.out.as_deref().map_or("stdout".to_string(), |p| p.display().to_string());
    eprintln!("generated {} records with seed {} to {dest}", log.len(), args.seed);
    Ok(())
}

#[derive(Serialize)]
struct EstimateResult {
    attrs: Vec<String>,
    #[serde(flatten)]
    evaluation: tradeopt_core::Evaluation,
}

fn run_estimate(args: &EstimateArgs) -> Result<()> {
    let prepared = args.data.prepare(args.lambda, &[])?;
    let obj = &prepared.objective;
    let set = parse_attrs(obj.schema(), &args.attrs)?;
    let evaluation = obj.evaluate(set)?;
    let result = EstimateResult {
        attrs: obj.schema().names(set),
        evaluation,
    };
    let meta = RunMeta::new("estimate", prepared.seed, config_with_inputs(args, prepared.inputs)?);
    match args.format {
        Format::Json => emit(args.out.as_deref(), &meta.wrap(&result)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "attrs",
                "utility_bits",
                "identifiability",
                "sensitivity_bits",
                "cost",
                "objective",
                "lambda",
                "n_samples_used",
            ])?;
            let e = &result.evaluation;
            w.write_record([
                result.attrs.join("+"),
                e.utility.to_string(),
                e.identifiability.to_string(),
                e.sensitivity.to_string(),
                e.cost.to_string(),
                e.objective.to_string(),
                e.lambda.to_string(),
                e.n_samples_used.to_string(),
            ])?;
            emit_csv(args.out.as_deref(), &w.into_inner()?, &meta)
        }
    }
}

fn with_bound(obj: &Objective, mut selection: tradeopt_core::Selection) -> Result<tradeopt_core::Selection> {
    selection.upper_bound = Some(online_bound(obj, selection.chosen)?);
    Ok(selection)
}

fn run_optimize(args: &OptimizeArgs) -> Result<()> {
    let prepared = args.data.prepare(args.lambda, &args.attrs)?;
    let obj = &prepared.objective;
    let options = args.solver.options()?;
    let result = if let (Some(kind), Some(k)) = (args.objective, args.k) {
        let trace = match options.algorithm {
            Algorithm::Lazy => lazy_greedy(obj, kind.into(), k)?,
            _ => greedy(obj, kind.into(), k)?,
        };
        json!({
            "objective": kind,
            "order": trace.order.iter().map(|&i| obj.schema().names(AttrSet::singleton(i)).remove(0)).collect::<Vec<_>>(),
            "incremental_values": trace.incremental_values,
            "eval_count": trace.eval_count,
        })
    } else if let Some(budget) = args.budget {
        let mut constrained = constrained_max_utility(obj, budget, &options)?;
        constrained.selection = with_bound(obj, constrained.selection)?;
        serde_json::to_value(constrained)?
    } else {
        let selection = match solve(obj, &options) {
            Ok(s) => s,
            Err(Error::PassLimit { max_passes, best }) => {
                let best = serde_json::to_string(&best)?;
                bail!("local search did not converge within {max_passes} rounds; best so far: {best}");
            }
            Err(e) => return Err(e.into()),
        };
        serde_json::to_value(with_bound(obj, selection)?)?
    };
    let meta = RunMeta::new("optimize", prepared.seed, config_with_inputs(args, prepared.inputs)?);
    emit(args.out.as_deref(), &meta.wrap(&result)?)
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let lambdas = parse_grid(&args.grid)?;
    let prepared = args.data.prepare(lambdas[0].max(0.0), &args.attrs)?;
    let curve = sweep_lambda(&prepared.objective, &lambdas, &args.solver.options()?)?;
    let meta = RunMeta::new("sweep", prepared.seed, config_with_inputs(args, prepared.inputs)?);
    match args.format {
        Format::Json => emit(args.out.as_deref(), &meta.wrap(&curve)?),
        Format::Csv => {
            let mut csv = Vec::new();
            curve.write_csv(&mut csv)?;
            emit_csv(args.out.as_deref(), &csv, &meta)
        }
    }
}

fn run_bound(args: &BoundArgs) -> Result<()> {
    let prepared = args.data.prepare(args.lambda, &args.attrs)?;
    let obj = &prepared.objective;
    let reference = obj.schema().parse_subset(&args.reference)?;
    let bound = online_bound(obj, reference)?;
    let result = json!({
        "reference": obj.schema().names(reference),
        "lambda": obj.lambda(),
        "reference_value": obj.evaluate(reference)?.objective,
        "upper_bound": bound,
    });
    let meta = RunMeta::new("bound", prepared.seed, config_with_inputs(args, prepared.inputs)?);
    emit(args.out.as_deref(), &meta.wrap(&result)?)
}

fn digest(path: &Path, bytes: &[u8]) -> Value {
    json!({ "path": path.display().to_string(), "sha256": output::sha256_hex(bytes) })
}

fn run_calibrate(args: &CalibrateArgs) -> Result<()> {
    if args.points.is_none() && args.speedups.is_none() {
        bail!("nothing to calibrate: pass --points and/or --speedups with --levels");
    }
    let mut inputs = serde_json::Map::new();
    let mut result = serde_json::Map::new();
    if let Some(path) = &args.points {
        let bytes = read_input(path)?;
        inputs.insert("points".into(), digest(path, &bytes));
        let points = read_granularity(bytes.as_slice()).with_context(|| format!("in {}", path.display()))?;
        let fit = if args.intercept {
            fit_lambda_with_intercept(&points)?
        } else {
            fit_lambda(&points)?
        };
        result.insert("calibration".into(), serde_json::to_value(fit)?);
    }
    if let (Some(sp), Some(lv)) = (&args.speedups, &args.levels) {
        let sp_bytes = read_input(sp)?;
        let lv_bytes = read_input(lv)?;
        inputs.insert("speedups".into(), digest(sp, &sp_bytes));
        inputs.insert("levels".into(), digest(lv, &lv_bytes));
        let responses = read_speedups(sp_bytes.as_slice()).with_context(|| format!("in {}", sp.display()))?;
        let scale = level_bits(&responses)?;
        let levels = read_attribute_levels(lv_bytes.as_slice()).with_context(|| format!("in {}", lv.display()))?;
        let table = sensitivity_to_bits(&scale, &levels)?;
        let rows: Vec<Value> = table
            .iter()
            .map(|(a, s)| json!({ "attribute": a, "sensitivity_bits": s }))
            .collect();
        let scale_json: serde_json::Map<String, Value> = scale
            .iter()
            .map(|(k, v)| (k.clone(), if v.is_finite() { json!(v) } else { json!("never") }))
            .collect();
        result.insert("level_bits".into(), Value::Object(scale_json));
        result.insert("sensitivities".into(), Value::Array(rows));
        if let Some(path) = &args.sens_out {
            let mut csv = Vec::new();
            write_sensitivity_table(&table, &mut csv)?;
            output::write_atomic(path, &csv)?;
        }
    }
    let meta = RunMeta::new("calibrate", None, config_with_inputs(args, Value::Object(inputs))?);
    emit(args.out.as_deref(), &meta.wrap(&Value::Object(result))?)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Optimize(a) => run_optimize(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Bound(a) => run_bound(a),
        Command::Calibrate(a) => run_calibrate(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("lin:0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("log:0.1:10:3").unwrap();
        assert!((g[1] - 1.0).abs() < 1e-12 && (g[2] - 10.0).abs() < 1e-12);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert_eq!(parse_grid("lin:3:3:1").unwrap(), vec![3.0]);
        assert!(parse_grid("log:0:1:3").is_err());
        assert!(parse_grid("lin:0:1:0").is_err());
        assert!(parse_grid("cubic:0:1:2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

//! Putting sensitivity, identifiability and utility into common units (bits)
//! and fitting the conversion factor lambda.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttrSet, AttributeSchema};

/// Bits worth a search speedup by the factor `x`: `log2(x)`.
pub fn bits_from_speedup(x: f64) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("speedup must be a finite number >= 1, got {x}")));
    }
    Ok(x.log2())
}

/// One location granularity: its identifiability cost from data and the
/// bits respondents require to share it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranularityPoint {
    pub label: String,
    pub cost: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub lambda: f64,
    /// Only set by [`fit_lambda_with_intercept`].
    pub intercept: Option<f64>,
    /// Sum of squared residuals.
    pub residual: f64,
    pub points_used: usize,
}

fn check_points(points: &[GranularityPoint]) -> Result<()> {
    for p in points {
        if !(p.cost >= 0.0) || !p.cost.is_finite() || !(p.bits >= 0.0) || !p.bits.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "point `{}` needs finite nonnegative cost and bits",
                p.label
            )));
        }
    }
    if !points.iter().any(|p| p.cost > 0.0) {
        return Err(Error::InvalidArgument("at least one point needs a positive cost".into()));
    }
    Ok(())
}

/// Least-squares fit of `bits = lambda * cost` through the origin.
pub fn fit_lambda(points: &[GranularityPoint]) -> Result<CalibrationResult> {
    check_points(points)?;
    let sxy: f64 = points.iter().map(|p| p.bits * p.cost).sum();
    let sxx: f64 = points.iter().map(|p| p.cost * p.cost).sum();
    let lambda = sxy / sxx;
    let residual = points.iter().map(|p| (p.bits - lambda * p.cost).powi(2)).sum();
    Ok(CalibrationResult {
        lambda,
        intercept: None,
        residual,
        points_used: points.len(),
    })
}

/// Ordinary least squares `bits = lambda * cost + intercept`; diagnostics only.
pub fn fit_lambda_with_intercept(points: &[GranularityPoint]) -> Result<CalibrationResult> {
    check_points(points)?;
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.cost).sum::<f64>() / n;
    let my = points.iter().map(|p| p.bits).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.cost - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("an intercept fit needs at least two distinct costs".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.cost - mx) * (p.bits - my)).sum();
    let lambda = sxy / sxx;
    let intercept = my - lambda * mx;
    let residual = points
        .iter()
        .map(|p| (p.bits - lambda * p.cost - intercept).powi(2))
        .sum();
    Ok(CalibrationResult {
        lambda,
        intercept: Some(intercept),
        residual,
        points_used: points.len(),
    })
}

/// Improvement a respondent requires before sharing at some sensitivity level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RequiredSpeedup {
    Factor(f64),
    /// Would not share at any improvement.
    Never,
}

impl RequiredSpeedup {
    /// Bits required; `Never` is infinite.
    pub fn bits(self) -> Result<f64> {
        match self {
            RequiredSpeedup::Factor(x) => bits_from_speedup(x),
            RequiredSpeedup::Never => Ok(f64::INFINITY),
        }
    }

    fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("never") {
            return Ok(RequiredSpeedup::Never);
        }
        let x: f64 = t
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad speedup `{t}`")))?;
        bits_from_speedup(x)?;
        Ok(RequiredSpeedup::Factor(x))
    }
}

impl fmt::Display for RequiredSpeedup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RequiredSpeedup::Factor(x) => write!(f, "{x}"),
            RequiredSpeedup::Never => f.write_str("never"),
        }
    }
}

/// Median of `values`, averaging the middle pair for even counts. Infinite
/// entries sort last.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        Some(v[mid])
    } else {
        Some(0.5 * (v[mid - 1] + v[mid]))
    }
}

/// Sensitivity level label to required bits; infinite means never share.
pub type LevelBits = BTreeMap<String, f64>;

/// Median bits per level over respondent answers.
pub fn level_bits(responses: &[(String, RequiredSpeedup)]) -> Result<LevelBits> {
    let mut by_level: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (level, speedup) in responses {
        by_level.entry(level.clone()).or_default().push(speedup.bits()?);
    }
    Ok(by_level
        .into_iter()
        .map(|(level, bits)| (level, median(&bits).expect("nonempty group")))
        .collect())
}

/// Per-attribute sensitivity in bits; `None` marks an attribute never to be shared.
pub type SensitivityTable = Vec<(String, Option<f64>)>;

/// `s(a) = log2(speedup(level(a)))` for every attribute.
pub fn sensitivity_to_bits(scale: &LevelBits, attr_levels: &[(String, String)]) -> Result<SensitivityTable> {
    attr_levels
        .iter()
        .map(|(attr, level)| {
            let bits = scale.get(level).ok_or_else(|| {
                Error::InvalidArgument(format!("no speedup mapping for level `{level}` of `{attr}`"))
            })?;
            Ok((attr.clone(), bits.is_finite().then_some(*bits)))
        })
        .collect()
}

/// Schema with the table's sensitivities and the candidate set without
/// never-shared attributes. Attributes missing from the table keep theirs.
pub fn apply_sensitivities(schema: &AttributeSchema, table: &SensitivityTable) -> Result<(AttributeSchema, AttrSet)> {
    let mut sens = schema.sensitivities();
    let mut candidates = schema.full_set();
    for (name, bits) in table {
        let i = schema
            .position(name)
            .ok_or_else(|| Error::UnknownAttribute(name.clone()))?;
        match bits {
            Some(b) => sens[i] = *b,
            None => candidates.remove(i),
        }
    }
    Ok((schema.with_sensitivities(&sens)?, candidates))
}

fn reader<R: Read>(source: R, expected: &[&str]) -> Result<csv::Reader<R>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header = r.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::parse(
            1,
            format!("expected header `{}`, got `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(r)
}

fn rows<R: Read>(source: R, expected: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut r = reader(source, expected)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != expected.len() {
            return Err(Error::parse(line, format!("expected {} fields", expected.len())));
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn number(line: u64, text: &str, what: &str) -> Result<f64> {
    text.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{text}`")))
}

/// Reads `label,cost,bits`.
pub fn read_granularity<R: Read>(source: R) -> Result<Vec<GranularityPoint>> {
    rows(source, &["label", "cost", "bits"])?
        .into_iter()
        .map(|(line, r)| {
            Ok(GranularityPoint {
                label: r[0].to_string(),
                cost: number(line, &r[1], "cost")?,
                bits: number(line, &r[2], "bits")?,
            })
        })
        .collect()
}

/// Reads `level,speedup`; a level may repeat (one row per respondent) and
/// `never` is accepted as a speedup.
pub fn read_speedups<R: Read>(source: R) -> Result<Vec<(String, RequiredSpeedup)>> {
    rows(source, &["level", "speedup"])?
        .into_iter()
        .map(|(line, r)| {
            let s = RequiredSpeedup::parse(&r[1]).map_err(|e| Error::parse(line, e.to_string()))?;
            Ok((r[0].to_string(), s))
        })
        .collect()
}

/// Reads `attribute,level`.
pub fn read_attribute_levels<R: Read>(source: R) -> Result<Vec<(String, String)>> {
    Ok(rows(source, &["attribute", "level"])?
        .into_iter()
        .map(|(_, r)| (r[0].to_string(), r[1].to_string()))
        .collect())
}

/// Reads `attribute,sensitivity_bits`; `never` excludes the attribute.
pub fn read_sensitivity_table<R: Read>(source: R) -> Result<SensitivityTable> {
    rows(source, &["attribute", "sensitivity_bits"])?
        .into_iter()
        .map(|(line, r)| {
            let bits = if r[1].eq_ignore_ascii_case("never") {
                None
            } else {
                let b = number(line, &r[1], "sensitivity")?;
                if !(b >= 0.0) || !b.is_finite() {
                    return Err(Error::parse(line, format!("sensitivity must be >= 0, got {b}")));
                }
                Some(b)
            };
            Ok((r[0].to_string(), bits))
        })
        .collect()
}

pub fn write_sensitivity_table<W: Write>(table: &SensitivityTable, mut writer: W) -> Result<()> {
    writeln!(writer, "attribute,sensitivity_bits")?;
    for (name, bits) in table {
        match bits {
            Some(b) => writeln!(writer, "{name},{b}")?,
            None => writeln!(writer, "{name},never")?,
        }
    }
    Ok(())
}

//! Event logs: one row per request with the user, query, chosen intent and
//! the attribute vector observed for that request.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::schema::AttributeSchema;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventRecord {
    pub user: u64,
    pub query: u32,
    pub intent: u32,
    pub values: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct EventLog {
    schema: AttributeSchema,
    records: Vec<EventRecord>,
    /// Row indices per query id.
    query_rows: BTreeMap<u32, Vec<usize>>,
}

impl EventLog {
    pub fn new(schema: AttributeSchema, records: Vec<EventRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyLog);
        }
        let mut query_rows: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (row, rec) in records.iter().enumerate() {
            check_record(&schema, rec, row as u64 + 2)?;
            query_rows.entry(rec.query).or_default().push(row);
        }
        Ok(EventLog {
            schema,
            records,
            query_rows,
        })
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn queries(&self) -> impl Iterator<Item = u32> + '_ {
        self.query_rows.keys().copied()
    }

    pub fn rows_for_query(&self, query: u32) -> &[usize] {
        self.query_rows.get(&query).map_or(&[], Vec::as_slice)
    }

    /// Replaces the schema (e.g. after calibrating sensitivities). Names and
    /// domains must be compatible with the recorded values.
    pub fn with_schema(&self, schema: AttributeSchema) -> Result<Self> {
        if schema.len() != self.schema.len() {
            return Err(Error::Schema(format!(
                "schema has {} attributes, log has {}",
                schema.len(),
                self.schema.len()
            )));
        }
        EventLog::new(schema, self.records.clone())
    }
}

fn check_record(schema: &AttributeSchema, rec: &EventRecord, line: u64) -> Result<()> {
    if rec.values.len() != schema.len() {
        return Err(Error::parse(
            line,
            format!("expected {} attribute values, got {}", schema.len(), rec.values.len()),
        ));
    }
    for (attr, &v) in schema.attributes().iter().zip(&rec.values) {
        if v as usize >= attr.cardinality {
            return Err(Error::Domain {
                line,
                attribute: attr.name.clone(),
                value: v as u64,
                cardinality: attr.cardinality,
            });
        }
    }
    Ok(())
}

/// Reads a CSV event log with header `user,query,intent,<attr1>,...,<attrm>`.
///
/// Attribute columns may appear in any order but must name exactly the
/// schema's attributes. Row order is preserved.
pub fn load_log<R: Read>(source: R, schema: &AttributeSchema) -> Result<EventLog> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyLog);
    }
    let fixed = ["user", "query", "intent"];
    for (i, want) in fixed.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h.trim() == *want => {}
            Some(h) => {
                return Err(Error::parse(1, format!("expected column `{want}`, found `{h}`")))
            }
            None => return Err(Error::parse(1, format!("missing column `{want}`"))),
        }
    }
    // column position -> schema position
    let mut column_attr = Vec::with_capacity(headers.len() - 3);
    let mut seen = vec![false; schema.len()];
    for h in headers.iter().skip(3) {
        let name = h.trim();
        let pos = schema
            .position(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        if seen[pos] {
            return Err(Error::parse(1, format!("duplicate column `{name}`")));
        }
        seen[pos] = true;
        column_attr.push(pos);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::parse(
            1,
            format!("missing attribute column `{}`", schema.attribute(missing).name),
        ));
    }

    let mut records = Vec::new();
    for result in reader.records() {
        let row = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != headers.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, got {}", headers.len(), row.len()),
            ));
        }
        let field = |i: usize| -> Result<u64> {
            row[i]
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(line, format!("`{}` is not a nonnegative integer", &row[i])))
        };
        let user = field(0)?;
        let query = to_u32(field(1)?, line, "query")?;
        let intent = to_u32(field(2)?, line, "intent")?;
        let mut values = vec![0u32; schema.len()];
        for (col, &pos) in column_attr.iter().enumerate() {
            let v = field(col + 3)?;
            let attr = schema.attribute(pos);
            if v >= attr.cardinality as u64 {
                return Err(Error::Domain {
                    line,
                    attribute: attr.name.clone(),
                    value: v,
                    cardinality: attr.cardinality,
                });
            }
            values[pos] = v as u32;
        }
        records.push(EventRecord {
            user,
            query,
            intent,
            values,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyLog);
    }
    EventLog::new(schema.clone(), records)
}

fn to_u32(v: u64, line: u64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::parse(line, format!("{what} id {v} exceeds 32 bits")))
}

/// Writes the log as CSV in schema column order, LF line endings.
pub fn write_log<W: Write>(log: &EventLog, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let mut header = vec!["user".to_string(), "query".into(), "intent".into()];
    header.extend(log.schema().attributes().iter().map(|a| a.name.clone()));
    writer.write_record(&header).map_err(csv_io)?;
    let mut fields = Vec::with_capacity(header.len());
    for rec in log.records() {
        fields.clear();
        fields.push(rec.user.to_string());
        fields.push(rec.query.to_string());
        fields.push(rec.intent.to_string());
        fields.extend(rec.values.iter().map(u32::to_string));
        writer.write_record(&fields).map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Infers a schema from a CSV header and data: every attribute gets domain
/// `max(2, max value + 1)` and zero sensitivity.
pub fn infer_schema<R: Read>(source: R) -> Result<AttributeSchema> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.len() < 4 {
        return Err(Error::parse(1, "header needs user,query,intent and at least one attribute"));
    }
    let names: Vec<String> = headers.iter().skip(3).map(|h| h.trim().to_string()).collect();
    let mut max = vec![0u64; names.len()];
    let mut rows = 0usize;
    for result in reader.records() {
        let row = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        for (i, m) in max.iter_mut().enumerate() {
            let cell = row.get(i + 3).unwrap_or("");
            let v: u64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("`{cell}` is not a nonnegative integer")))?;
            *m = (*m).max(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyLog);
    }
    let attrs = names
        .into_iter()
        .zip(max)
        .map(|(name, m)| super::schema::AttributeDef::new(name, (m as usize + 1).max(2)))
        .collect();
    AttributeSchema::new(attrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::schema::AttributeDef;

    fn schema() -> AttributeSchema {
        AttributeSchema::new(vec![AttributeDef::new("V1", 2)]).unwrap()
    }

    const FOUR_ROWS: &str = "user,query,intent,V1\n1,0,1,0\n2,0,1,0\n3,0,2,1\n4,0,3,1\n";

    #[test]
    fn loads_four_rows() {
        let log = load_log(FOUR_ROWS.as_bytes(), &schema()).unwrap();
        assert_eq!(log.len(), 4);
        assert_eq!(log.records()[2].intent, 2);
        assert_eq!(log.rows_for_query(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn domain_violation_names_line() {
        let text = "user,query,intent,V1\n1,0,1,0\n2,0,1,2\n";
        match load_log(text.as_bytes(), &schema()) {
            Err(Error::Domain { line, attribute, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(attribute, "V1");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_and_unknown() {
        let bad = "user,query,intent,V1\n1,0,x,0\n";
        assert!(matches!(load_log(bad.as_bytes(), &schema()), Err(Error::Parse { line: 2, .. })));
        let short = "user,query,intent,V1\n1,0,1\n";
        assert!(matches!(load_log(short.as_bytes(), &schema()), Err(Error::Parse { line: 2, .. })));
        let unknown = "user,query,intent,V9\n1,0,1,0\n";
        assert!(matches!(load_log(unknown.as_bytes(), &schema()), Err(Error::UnknownColumn(_))));
        assert!(matches!(load_log("".as_bytes(), &schema()), Err(Error::EmptyLog)));
        let header_only = "user,query,intent,V1\n";
        assert!(matches!(load_log(header_only.as_bytes(), &schema()), Err(Error::EmptyLog)));
    }

    #[test]
    fn write_reproduces_input() {
        let log = load_log(FOUR_ROWS.as_bytes(), &schema()).unwrap();
        let mut out = Vec::new();
        write_log(&log, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), FOUR_ROWS);
    }

    #[test]
    fn columns_may_be_permuted() {
        let schema = AttributeSchema::new(vec![AttributeDef::new("A", 2), AttributeDef::new("B", 3)]).unwrap();
        let text = "user,query,intent,B,A\n1,0,0,2,1\n";
        let log = load_log(text.as_bytes(), &schema).unwrap();
        assert_eq!(log.records()[0].values, vec![1, 2]);
    }

    #[test]
    fn infers_domains() {
        let schema = infer_schema(FOUR_ROWS.as_bytes()).unwrap();
        assert_eq!(schema.cardinalities(), vec![2]);
        let text = "user,query,intent,A,B\n1,0,0,0,4\n";
        assert_eq!(infer_schema(text.as_bytes()).unwrap().cardinalities(), vec![2, 5]);
    }
}

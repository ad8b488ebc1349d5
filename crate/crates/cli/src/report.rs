//! Report assembly and JSON/CSV output.

use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeSet;

/// Seed of trial `t` under `seed`; trial 0 uses the seed itself.
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed ^ t.rotate_right(16)
}

/// One result row plus its seed, trial and tolerance fields.
pub struct Row(Map<String, Value>);

impl Row {
    pub fn new<T: Serialize>(body: &T, seed: u64, trial: u64, trials: u64, tolerance: f64) -> Self {
        let mut m = match serde_json::to_value(body) {
            Ok(Value::Object(m)) => m,
            Ok(v) => Map::from_iter([("value".to_string(), v)]),
            Err(e) => Map::from_iter([("error".to_string(), Value::from(e.to_string()))]),
        };
        m.insert("seed".into(), seed.into());
        m.insert("trial".into(), trial.into());
        m.insert("trial_seed".into(), trial_seed(seed, trial).into());
        m.insert("trials".into(), trials.into());
        m.insert("tolerance".into(), tolerance.into());
        Row(m)
    }

    pub fn kind(mut self, kind: &str) -> Self {
        self.0.insert("kind".into(), kind.into());
        self
    }
}

#[derive(Serialize)]
pub struct Summary {
    pub rows: usize,
    pub hard_failures: u64,
    pub exceedances: u64,
    pub strict: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<Value>,
}

pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub rows: Vec<Map<String, Value>>,
    pub hard_failures: u64,
    pub exceedances: u64,
    pub aggregate: Option<Value>,
}

impl Report {
    pub fn new(schema: u32, command: &str, config: Value) -> Self {
        Report {
            schema,
            command: command.into(),
            config,
            rows: Vec::new(),
            hard_failures: 0,
            exceedances: 0,
            aggregate: None,
        }
    }

    pub fn push(&mut self, row: Row, hard: u64, exceeded: bool) {
        self.rows.push(row.0);
        self.hard_failures += hard;
        self.exceedances += exceeded as u64;
    }

    pub fn summary(&self, strict: bool) -> Summary {
        Summary {
            rows: self.rows.len(),
            hard_failures: self.hard_failures,
            exceedances: self.exceedances,
            strict,
            pass: self.hard_failures == 0 && !(strict && self.exceedances > 0),
            aggregate: self.aggregate.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String, String> {
        let strict = self.config["strict"].as_bool().unwrap_or(false);
        let v = serde_json::json!({
            "schema": self.schema,
            "command": self.command,
            "config": self.config,
            "rows": self.rows,
            "summary": self.summary(strict),
        });
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| e.to_string())?;
        s.push('\n');
        Ok(s)
    }

    /// Rows only; columns are the union of all row fields, with the
    /// schema version prepended.
    pub fn to_csv(&self) -> Result<String, String> {
        let cols: BTreeSet<&str> = self
            .rows
            .iter()
            .flat_map(|r| r.keys().map(String::as_str))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("schema").chain(cols.iter().copied());
        w.write_record(header).map_err(|e| e.to_string())?;
        for r in &self.rows {
            let cells = std::iter::once(self.schema.to_string())
                .chain(cols.iter().map(|c| r.get(*c).map(cell).unwrap_or_default()));
            w.write_record(cells).map_err(|e| e.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

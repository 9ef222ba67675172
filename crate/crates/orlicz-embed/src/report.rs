//! Report containers and their JSON / CSV renderings.
//!
//! Every floating-point number is rounded to 12 significant digits on the way
//! out; non-finite values become `null`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Numeric columns, e.g. one row per grid point `ℓ`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Outcome of one `verify` suite.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub lemma: String,
    pub params: Map<String, Value>,
    pub pass: bool,
    pub empirical_constants: Map<String, Value>,
    pub paper_constants: Map<String, Value>,
    pub worst_case_instance: Option<Value>,
    pub details: Map<String, Value>,
    pub table: Table,
}

impl VerifyReport {
    pub fn new(lemma: &str, params: Map<String, Value>) -> Self {
        VerifyReport {
            lemma: lemma.to_string(),
            params,
            pass: true,
            ..Default::default()
        }
    }

    pub fn empirical(&mut self, key: &str, v: impl Serialize) {
        self.empirical_constants.insert(key.into(), to_value(v));
    }

    pub fn paper(&mut self, key: &str, v: impl Serialize) {
        self.paper_constants.insert(key.into(), to_value(v));
    }

    pub fn detail(&mut self, key: &str, v: impl Serialize) {
        self.details.insert(key.into(), to_value(v));
    }

    /// Records a asserted constant; any failure fails the report.
    pub fn check(&mut self, name: &str, ok: bool) {
        self.details
            .entry("checks")
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .expect("checks is an object")
            .insert(name.into(), Value::Bool(ok));
        self.pass &= ok;
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialise")
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Rounds every float in `v` in place.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            *v = Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn render_json(report: &impl Serialize) -> String {
    let mut v = to_value(report);
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serialises");
    s.push('\n');
    s
}

pub fn render_csv(table: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| fmt_number(*x)).collect();
        w.write_record(&cells).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

/// Decimal text with 12 significant digits; `nan`/`inf` spelled out.
pub fn fmt_number(x: f64) -> String {
    if x.is_finite() {
        let v = serde_json::Number::from_f64(round12(x)).expect("finite");
        v.to_string()
    } else {
        x.to_string()
    }
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

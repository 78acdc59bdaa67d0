//! Report rows and CSV/JSON emission.
//!
//! The CSV schema is fixed; floats go out at 17 significant digits so
//! two runs of the same seeded sweep are byte-identical. JSON mirrors
//! the same columns as an array of objects at full f64 precision.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::bounds::TheoremTag;
use crate::convexity::{Sense, Witness};

pub const CSV_COLUMNS: [&str; 18] = [
    "function",
    "a",
    "b",
    "p",
    "q",
    "sense",
    "s",
    "alpha",
    "m",
    "theorem",
    "exponent",
    "membership",
    "lhs",
    "lhs_err",
    "bound",
    "slack_ratio",
    "pass",
    "skip_reason",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipLabel {
    Satisfied,
    Violated,
    Error,
}

impl MembershipLabel {
    pub fn label(self) -> &'static str {
        match self {
            MembershipLabel::Satisfied => "satisfied_on_samples",
            MembershipLabel::Violated => "violated",
            MembershipLabel::Error => "error",
        }
    }
}

/// One (function, interval, p, q, theorem, spec, exponent) evaluation.
///
/// `pass` is None for rows that were skipped (membership violated, a
/// per-row error, or a conjectural second-sense row); those never count
/// as failures. The violating sample, when there is one, is kept in
/// structured form alongside the human-readable skip_reason so tests
/// can re-verify it without parsing text.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
    pub sense: Option<Sense>,
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub m: Option<f64>,
    pub theorem: TheoremTag,
    pub exponent: Option<f64>,
    pub membership: MembershipLabel,
    pub lhs: Option<f64>,
    pub lhs_err: Option<f64>,
    pub bound: Option<f64>,
    pub slack_ratio: Option<f64>,
    pub pass: Option<bool>,
    pub skip_reason: Option<String>,
    pub witness: Option<Witness<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundReport {
    pub rows: Vec<ReportRow>,
}

impl BoundReport {
    pub fn fail_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn pass_count(&self) -> usize {
        self.rows.iter().filter(|r| r.pass == Some(true)).count()
    }

    pub fn fail_count(&self) -> usize {
        self.rows.iter().filter(|r| r.pass == Some(false)).count()
    }

    pub fn skipped_count(&self) -> usize {
        self.rows.iter().filter(|r| r.pass.is_none()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn sense_label(s: Option<Sense>) -> &'static str {
    match s {
        Some(Sense::First) => "first",
        Some(Sense::Second) => "second",
        None => "",
    }
}

fn csv_record(row: &ReportRow) -> [String; 18] {
    [
        row.function.clone(),
        fmt_f64(row.a),
        fmt_f64(row.b),
        fmt_f64(row.p),
        fmt_f64(row.q),
        sense_label(row.sense).to_string(),
        fmt_opt(row.s),
        fmt_opt(row.alpha),
        fmt_opt(row.m),
        row.theorem.label().to_string(),
        fmt_opt(row.exponent),
        row.membership.label().to_string(),
        fmt_opt(row.lhs),
        fmt_opt(row.lhs_err),
        fmt_opt(row.bound),
        fmt_opt(row.slack_ratio),
        row.pass.map(|p| p.to_string()).unwrap_or_default(),
        row.skip_reason.clone().unwrap_or_default(),
    ]
}

pub fn write_csv<W: Write>(report: &BoundReport, w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let to_io = |e: csv::Error| io::Error::other(e);
    out.write_record(CSV_COLUMNS).map_err(to_io)?;
    for row in &report.rows {
        out.write_record(csv_record(row)).map_err(to_io)?;
    }
    out.flush()
}

fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

fn json_row(row: &ReportRow) -> Value {
    json!({
        "function": row.function,
        "a": row.a,
        "b": row.b,
        "p": row.p,
        "q": row.q,
        "sense": row.sense.map(|s| sense_label(Some(s))),
        "s": opt_num(row.s),
        "alpha": opt_num(row.alpha),
        "m": opt_num(row.m),
        "theorem": row.theorem.label(),
        "exponent": opt_num(row.exponent),
        "membership": row.membership.label(),
        "lhs": opt_num(row.lhs),
        "lhs_err": opt_num(row.lhs_err),
        "bound": opt_num(row.bound),
        "slack_ratio": opt_num(row.slack_ratio),
        "pass": row.pass,
        "skip_reason": row.skip_reason,
    })
}

pub fn write_json<W: Write>(report: &BoundReport, mut w: W) -> io::Result<()> {
    let rows: Vec<Value> = report.rows.iter().map(json_row).collect();
    serde_json::to_writer_pretty(&mut w, &Value::Array(rows))?;
    writeln!(w)
}

/// Write the report to `path` in the requested format.
pub fn emit_report(
    report: &BoundReport,
    format: ReportFormat,
    path: &Path,
) -> Result<(), EmitError> {
    let wrap = |source: io::Error| EmitError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    match format {
        ReportFormat::Csv => write_csv(report, file).map_err(wrap),
        ReportFormat::Json => write_json(report, file).map_err(wrap),
    }
}

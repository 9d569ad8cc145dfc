//! Byte-stable JSON and CSV output.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which round-trips every `f64`.
//! Wall times go to a separate table so that reports of identical configs are identical.

use std::fmt::Write as _;

use crate::scenario::{RunReport, SweepRow};
use crate::CliError;

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => "\"NaN\"".into(),
        Some(v) if v > 0.0 => "\"inf\"".into(),
        Some(_) => "\"-inf\"".into(),
        None => "null".into(),
    }
}

fn csv_num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => String::new(),
    }
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn pass_str(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "true",
        Some(false) => "false",
        None => "null",
    }
}

/// A JSON array with one object per scenario, in the given order.
pub fn to_json(reports: &[RunReport]) -> String {
    if reports.is_empty() {
        return "[]\n".into();
    }
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        let sweep: Vec<String> = r
            .sweep
            .iter()
            .map(|s| {
                format!(
                    "{{\"degree\": {}, \"lhs\": {}, \"rhs\": {}}}",
                    s.degree,
                    num(Some(s.lhs)),
                    num(Some(s.rhs))
                )
            })
            .collect();
        let _ = write!(
            out,
            "  {{\"id\": {}, \"tag\": {}, \"lhs\": {}, \"rhs\": {}, \"ratio\": {}, \"pass\": {}, \"status\": {}, \"detail\": {}, \"sweep\": [{}]}}",
            json_str(&r.id),
            json_str(r.tag.name()),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            pass_str(r.pass),
            json_str(r.status.as_str()),
            json_str(&r.detail),
            sweep.join(", ")
        );
        out.push_str(if i + 1 < reports.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

/// `id,lhs,rhs,ratio,pass`; cells without a value are empty.
pub fn to_csv(reports: &[RunReport]) -> String {
    let mut out = String::from("id,lhs,rhs,ratio,pass\n");
    for r in reports {
        let pass = match r.pass {
            Some(p) => p.to_string(),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&r.id),
            csv_num(r.lhs),
            csv_num(r.rhs),
            csv_num(r.ratio),
            pass
        );
    }
    out
}

pub fn timings_csv(reports: &[RunReport]) -> String {
    let mut out = String::from("id,seconds\n");
    for r in reports {
        let _ = writeln!(out, "{},{:.6}", csv_field(&r.id), r.seconds);
    }
    out
}

/// Whether each value is at least the previous one, up to a relative slack.
pub fn nondecreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - slack * w[0].abs())
}

/// `degree,lhs,rhs,ratio` rows.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("degree,lhs,rhs,ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.degree,
            csv_num(Some(r.lhs)),
            csv_num(Some(r.rhs)),
            csv_num(Some(r.lhs / r.rhs))
        );
    }
    out
}

/// Rows of a stored JSON report, enough to re-emit it in either format.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredRow {
    pub id: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
}

fn stored_num(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => match s.as_str() {
            "NaN" => Some(f64::NAN),
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

pub fn parse_stored(text: &str) -> Result<Vec<StoredRow>, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("stored report: {e}")))?;
    let rows = value
        .as_array()
        .ok_or_else(|| CliError::Parse("stored report: expected a JSON array".into()))?;
    rows.iter()
        .map(|r| {
            let id = r
                .get("id")
                .and_then(|v| v.as_str())
                .ok_or_else(|| CliError::Parse("stored report: row without a string `id`".into()))?;
            let field = |k: &str| r.get(k).and_then(stored_num);
            Ok(StoredRow {
                id: id.to_string(),
                lhs: field("lhs"),
                rhs: field("rhs"),
                ratio: field("ratio"),
                pass: r.get("pass").and_then(|v| v.as_bool()),
            })
        })
        .collect()
}

/// The `report` subcommand's renderings of stored rows.
pub fn stored_json(rows: &[StoredRow]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in rows.iter().enumerate() {
        let _ = write!(
            out,
            "  {{\"id\": {}, \"lhs\": {}, \"rhs\": {}, \"ratio\": {}, \"pass\": {}}}",
            json_str(&r.id),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            pass_str(r.pass)
        );
        out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    if rows.is_empty() {
        "[]\n".into()
    } else {
        out
    }
}

pub fn stored_csv(rows: &[StoredRow]) -> String {
    let mut out = String::from("id,lhs,rhs,ratio,pass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(&r.id),
            csv_num(r.lhs),
            csv_num(r.rhs),
            csv_num(r.ratio),
            r.pass.map(|p| p.to_string()).unwrap_or_default()
        );
    }
    out
}

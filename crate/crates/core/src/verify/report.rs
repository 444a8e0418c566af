use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::VerificationReport;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub wall_time_s: f64,
}

impl Metadata {
    pub(crate) fn now(elapsed: Duration) -> Self {
        Self { version: env!("CARGO_PKG_VERSION").to_string(), wall_time_s: elapsed.as_secs_f64() }
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant decimal digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = serde_json::Number::from_f64(round_significant(x))
                    .map(Value::Number)
                    .unwrap_or(Value::Null);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

/// Serializes any value with floats rounded to 12 significant digits;
/// non-finite numbers become `null`.
pub fn to_json_value<T: Serialize>(value: &T) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_tree(&mut v);
    Ok(v)
}

/// Pretty JSON for a report. Without metadata the output is a pure function
/// of the configuration.
pub fn to_json(report: &VerificationReport, with_metadata: bool) -> String {
    let mut v = to_json_value(report).expect("reports serialize");
    if !with_metadata {
        if let Value::Object(map) = &mut v {
            map.remove("metadata");
        }
    }
    serde_json::to_string_pretty(&v).expect("values serialize")
}

/// Rendering with [`SIGNIFICANT_DIGITS`] significant digits, in exponent
/// form outside `[1e-4, 1e15)`; empty for non-finite values.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let r = round_significant(x);
    let a = r.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// One row per case: `suite,index,family,role,margin,tolerance,passed,error`.
pub fn to_csv(report: &VerificationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["suite", "index", "family", "role", "margin", "tolerance", "passed", "error"];
    w.write_record(header).expect("in-memory write");
    for c in &report.cases {
        let role = match c.role {
            super::Role::Asserted => "asserted",
            super::Role::Reported => "reported",
        };
        w.write_record([
            report.suite.as_str(),
            &c.index.to_string(),
            &c.family,
            role,
            &c.margin.map(format_number).unwrap_or_default(),
            &format_number(c.tolerance),
            &c.passed.to_string(),
            c.error.as_deref().unwrap_or(""),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_significant(-2.0 / 3.0 * 1e-20), -6.66666666667e-21);
        assert_eq!(round_significant(0.0), 0.0);
        let v = to_json_value(&vec![f64::NAN, 1.0 / 7.0, f64::INFINITY]).unwrap();
        assert_eq!(v.to_string(), "[null,0.142857142857,null]");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-1.0 / 3.0 * 1e-20), "-3.33333333333e-21");
        assert_eq!(format_number(2e20), "2e20");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(f64::NAN), "");
    }
}

//! CSV and JSON writers. Floats carry 12 significant digits.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// `v` in scientific notation with 12 significant digits.
pub fn fmt_num(v: f64) -> String {
    // adding +0 turns -0 into +0
    let v = v + 0.0;
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        format!("{v}")
    }
}

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if v.is_finite() {
        fmt_num(v).parse().expect("formatted float parses")
    } else {
        v
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round12(x)))
            {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with rounded floats; keys keep declaration order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

/// CSV text from a header and pre-formatted records.
pub fn to_csv(header: &[&str], records: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(0.1), "1.00000000000e-1");
        assert_eq!(fmt_num(f64::NAN), "NaN");
        assert_eq!(fmt_num(-0.0), "0.00000000000e0");
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn json_rounds_and_nulls() {
        #[derive(Serialize)]
        struct Row {
            b: f64,
            a: f64,
        }
        let text = to_json(&vec![Row {
            b: 2.0 / 3.0,
            a: f64::NAN,
        }])
        .unwrap();
        assert!(text.contains("0.666666666667"));
        assert!(text.contains("null"));
        assert!(text.find("\"b\"").unwrap() < text.find("\"a\"").unwrap());
    }

    #[test]
    fn csv_quotes_and_lf() {
        let text = to_csv(&["x", "status"], &[vec!["1".into(), "error: a, b".into()]]).unwrap();
        assert_eq!(text, "x,status\n1,\"error: a, b\"\n");
    }
}

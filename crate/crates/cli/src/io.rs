//! File formats: line-delimited JSON records in, JSON and CSV out.
//!
//! Every float written by the tool is rounded to 9 significant digits first,
//! then printed in its shortest form. Output is UTF-8 with LF line endings.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use mapsearch::Listing;

use crate::error::{CliError, USAGE};

pub const SIGNIFICANT_DIGITS: usize = 9;

/// `v` rounded to [`SIGNIFICANT_DIGITS`]. Non-finite values pass through and
/// negative zero becomes zero.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt_num(v: f64) -> String {
    let r = round_sig(v);
    if r.is_nan() {
        "nan".into()
    } else if r.is_infinite() {
        if r > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{r}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// Rounds every float inside a JSON tree; integers are left alone.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// One JSON document, floats rounded.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

/// One compact JSON object per line, floats rounded.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for record in records {
        let mut v = serde_json::to_value(record).expect("records serialize");
        round_json(&mut v);
        out.push_str(&serde_json::to_string(&v).expect("json values serialize"));
        out.push('\n');
    }
    out
}

/// CSV text from a header and pre-formatted rows.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.write_record(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv of utf-8 fields")
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| CliError::output(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::output(Path::new("<stdout>"), e))
        }
    }
}

pub fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

/// Refuses to overwrite any input with an output.
pub fn ensure_distinct(inputs: &[&Path], outputs: &[Option<&Path>]) -> Result<(), CliError> {
    let canonical = |p: &Path| fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    for out in outputs.iter().flatten() {
        for input in inputs {
            if canonical(out) == canonical(input) {
                return Err(CliError::new(
                    USAGE,
                    format!("output {} would overwrite an input", out.display()),
                ));
            }
        }
    }
    Ok(())
}

/// Parses a line-delimited JSON file. Blank lines are skipped; line numbers
/// in errors are 1-based.
pub fn read_json_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| CliError::at_line(path, i + 1, e))?;
        records.push((i + 1, record));
    }
    Ok(records)
}

/// An inventory file: valid listings with unique ids.
pub fn read_inventory(path: &Path) -> Result<Vec<Listing>, CliError> {
    let mut seen = std::collections::HashSet::new();
    read_json_lines::<Listing>(path)?
        .into_iter()
        .map(|(line, listing)| {
            listing
                .validate()
                .map_err(|e| CliError::at_line(path, line, e))?;
            if !seen.insert(listing.id.clone()) {
                return Err(CliError::at_line(
                    path,
                    line,
                    format!("duplicate listing id {}", listing.id),
                ));
            }
            Ok(listing)
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_nine_significant_digits() {
        assert_eq!(fmt_num(0.123456789123), "0.123456789");
        assert_eq!(fmt_num(-1234.56789012), "-1234.56789");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(std::f64::consts::LN_2), "0.693147181");
    }

    #[test]
    fn json_floats_are_rounded_and_integers_kept() {
        let mut v =
            serde_json::json!({"a": 0.1234567891234, "b": [3, 2.00000000001], "c": u64::MAX});
        round_json(&mut v);
        assert_eq!(
            v.to_string(),
            format!(r#"{{"a":0.123456789,"b":[3,2.0],"c":{}}}"#, u64::MAX)
        );
    }

    #[test]
    fn csv_uses_lf() {
        let s = to_csv(&["a", "b"], &[vec!["1".into(), "x".into()]]);
        assert_eq!(s, "a,b\n1,x\n");
    }
}

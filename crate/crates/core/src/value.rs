//! Typed cell values and the text canonicalization shared by the whole stack.
//!
//! Canonicalization (trim, casefold, whitespace collapse) is defined once here
//! so that table statistics, SQL comparisons, and scoring all agree on what
//! counts as "the same value".

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A single typed table cell.
///
/// `Null` is a distinct variant; an empty string is never used to stand in
/// for a missing value internally. List elements are non-empty trimmed
/// strings by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Text(String),
    Number(f64),
    Bool(bool),
    List(Vec<String>),
    Null,
}

impl CellValue {
    /// Build a list cell, dropping empty elements and trimming the rest.
    pub fn list<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        CellValue::List(
            items
                .into_iter()
                .map(|s| s.as_ref().trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CellValue::Null)
    }

    /// The display text of a cell. Lists join with `"; "`, null is empty.
    pub fn display_text(&self) -> String {
        match self {
            CellValue::Text(s) => s.clone(),
            CellValue::Number(n) => format_number(*n),
            CellValue::Bool(b) => b.to_string(),
            CellValue::List(items) => items.join("; "),
            CellValue::Null => String::new(),
        }
    }

    /// Numeric view of a cell, if it has one. Text cells are parsed.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            CellValue::Number(n) => Some(*n),
            CellValue::Text(s) => parse_number(s),
            _ => None,
        }
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_text())
    }
}

impl Serialize for CellValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CellValue::Text(s) => serializer.serialize_str(s),
            CellValue::Number(n) => serializer.serialize_f64(*n),
            CellValue::Bool(b) => serializer.serialize_bool(*b),
            CellValue::List(items) => items.serialize(serializer),
            CellValue::Null => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for CellValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        CellValue::from_json(&value).map_err(D::Error::custom)
    }
}

impl CellValue {
    /// Convert a JSON value into a cell. Arrays must hold scalars.
    pub fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        use serde_json::Value;
        Ok(match value {
            Value::Null => CellValue::Null,
            Value::Bool(b) => CellValue::Bool(*b),
            Value::Number(n) => {
                let f = n.as_f64().ok_or_else(|| format!("non-finite number {n}"))?;
                if !f.is_finite() {
                    return Err(format!("non-finite number {n}"));
                }
                CellValue::Number(f)
            }
            Value::String(s) => CellValue::Text(s.clone()),
            Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        Value::String(s) => out.push(s.clone()),
                        Value::Number(n) => out.push(n.to_string()),
                        Value::Bool(b) => out.push(b.to_string()),
                        other => return Err(format!("unsupported list element {other}")),
                    }
                }
                return Ok(CellValue::list(out));
            }
            Value::Object(_) => return Err("objects are not cell values".to_string()),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("cell serializes")
    }
}

/// Canonical text form: trim, casefold, collapse internal whitespace.
pub fn canonical_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for ch in s.trim().chars() {
        if ch.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        for lower in ch.to_lowercase() {
            out.push(lower);
        }
    }
    out
}

/// Canonical decimal rendering of a number: integral values print without a
/// fractional part, everything else with the shortest round-trip form.
pub fn format_number(n: f64) -> String {
    if n == n.trunc() && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// Parse a decimal literal. Rejects NaN/inf and empty input.
pub fn parse_number(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    match t.parse::<f64>() {
        Ok(f) if f.is_finite() => Some(f),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_collapses_and_casefolds() {
        assert_eq!(canonical_text("  PD-1 "), "pd-1");
        assert_eq!(canonical_text("Foo\t  Bar"), "foo bar");
        assert_eq!(canonical_text(""), "");
    }

    #[test]
    fn list_drops_empty_elements() {
        assert_eq!(
            CellValue::list(["a", " ", "b "]),
            CellValue::List(vec!["a".into(), "b".into()])
        );
    }

    #[test]
    fn number_formatting_is_canonical() {
        assert_eq!(format_number(8.0), "8");
        assert_eq!(format_number(36.5), "36.5");
        assert_eq!(format_number(-2.0), "-2");
    }

    #[test]
    fn json_round_trip() {
        for v in [
            CellValue::Text("x".into()),
            CellValue::Number(3.5),
            CellValue::Bool(true),
            CellValue::list(["a", "b"]),
            CellValue::Null,
        ] {
            let json = v.to_json();
            assert_eq!(CellValue::from_json(&json).unwrap(), v);
        }
    }
}

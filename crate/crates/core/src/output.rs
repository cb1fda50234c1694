//! Plain-text renderings of results: CSV tables and pretty JSON.
//!
//! Numbers are written in shortest round-trip form, so parsing a cell gives
//! back the exact `f64` that was computed.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::scenarios::ExperimentResult;

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:?}")
    }
}

/// Time series with columns `t, <level labels…>, trace, purity`.
pub fn series_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("t");
    for s in &result.populations {
        out.push(',');
        out.push_str(&s.label);
    }
    out.push_str(",trace,purity\n");
    for (i, t) in result.time_grid.iter().enumerate() {
        out.push_str(&format_number(*t));
        for s in &result.populations {
            out.push(',');
            out.push_str(&format_number(s.values[i]));
        }
        let _ = writeln!(
            out,
            ",{},{}",
            format_number(result.trace[i]),
            format_number(result.purity[i])
        );
    }
    out
}

/// Two-column `key,value` table of the summary scalars.
pub fn summary_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in &result.summary {
        let _ = writeln!(out, "{k},{}", format_number(*v));
    }
    out
}

/// One row per sweep value; columns are the swept parameter followed by the
/// union of summary keys (a key repeating the parameter name is dropped).
pub fn sweep_csv(parameter: &str, rows: &[(toml::Value, &ExperimentResult)]) -> String {
    let keys: BTreeSet<&str> = rows
        .iter()
        .flat_map(|(_, r)| r.summary.keys().map(String::as_str))
        .filter(|k| *k != parameter)
        .collect();
    let mut out = String::from(parameter);
    for k in &keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    for (value, result) in rows {
        out.push_str(&format_value(value));
        for k in &keys {
            out.push(',');
            if let Some(v) = result.summary.get(*k) {
                out.push_str(&format_number(*v));
            }
        }
        out.push('\n');
    }
    out
}

fn format_value(value: &toml::Value) -> String {
    match value {
        toml::Value::Float(x) => format_number(*x),
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2.5e17, -0.0, 0.375, std::f64::consts::PI] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_number(0.375), "0.375");
        assert_eq!(format_number(1.0), "1.0");
    }
}

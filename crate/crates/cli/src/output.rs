//! Serialization of result tables: CSV and JSON with 12 significant digits,
//! plus the manifest sidecar that accompanies every output file.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use xychain_core::{SweepRow, TimePoint};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const TIME_SERIES_HEADER: &str = "t,a,c1,c2,channel";
pub const FIELD_SWEEP_HEADER: &str = "b,c1_max,t_at_c1_max,c2_max_pos,c2_max_neg,a_envelope";

/// `printf("%.12g")`: 12 significant digits, trailing zeros removed, exponent
/// form below `1e-4` or from `1e12` on.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to the value the 12-digit text representation denotes.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_g(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

/// Rounds every number inside a JSON tree to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut tree = serde_json::to_value(value)?;
    round_json(&mut tree);
    let mut text = serde_json::to_string_pretty(&tree)?;
    text.push('\n');
    Ok(text)
}

pub fn time_series_csv(rows: &[TimePoint]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TIME_SERIES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", fmt_g(r.t), fmt_g(r.a), fmt_g(r.c1), fmt_g(r.c2), r.channel));
    }
    out
}

pub fn field_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(96 * (rows.len() + 1));
    out.push_str(FIELD_SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_g(r.b),
            fmt_g(r.c1_max),
            fmt_g(r.t_at_c1_max),
            fmt_g(r.c2_max_pos),
            fmt_g(r.c2_max_neg),
            fmt_g(r.a_envelope.unwrap_or(f64::NAN)),
        ));
    }
    out
}

/// Provenance record written next to each output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_echo: Value,
    pub tool_version: String,
    pub wall_time: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `text` to `out` (plus its manifest), or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>, manifest: &RunManifest) -> io::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            let body = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
            fs::write(manifest_path(path), body + "\n")
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printf_g_style() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(-0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_g(std::f64::consts::PI * 1e5), "314159.265359");
        assert_eq!(fmt_g(1e-5), "1e-05");
        assert_eq!(fmt_g(1.5e-7), "1.5e-07");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(f64::NAN), "nan");
        // rounding carries into the exponent
        assert_eq!(fmt_g(9.9999999999999e-5), "0.0001");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 1.0 / 7.0, 6.02214076e23, -1.602e-19, 0.6012] {
            let r = round_sig(x);
            assert_eq!(round_sig(r), r);
            assert_eq!(fmt_g(r), fmt_g(x));
        }
    }

    #[test]
    fn json_numbers_are_rounded() {
        let mut v = serde_json::json!({"x": 1.0 / 3.0, "n": 5, "list": [2.0 / 3.0, null]});
        round_json(&mut v);
        assert_eq!(v["x"].as_f64().unwrap(), 0.333333333333);
        assert_eq!(v["n"].as_u64().unwrap(), 5);
        assert_eq!(v["list"][0].as_f64().unwrap(), 0.666666666667);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.manifest.json"));
    }
}

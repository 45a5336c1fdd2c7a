//! Tabular scenario output and its CSV/JSON emission.
//!
//! Emission is byte-stable: identical series produce identical bytes, reals
//! are printed with 12 significant digits, and an optional hex-float block
//! preserves full binary precision in JSON.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Column payload: step/offset indices or real samples.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Ints(Vec<i64>),
    Reals(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Ints(v) => v.len(),
            Values::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Values,
}

impl Column {
    pub fn ints(name: &str, values: Vec<i64>) -> Self {
        Column {
            name: name.into(),
            values: Values::Ints(values),
        }
    }

    pub fn reals(name: &str, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            values: Values::Reals(values),
        }
    }
}

/// Scenario echo attached to every emitted series.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub scenario: String,
    pub artifact_version: String,
    /// Worst brute-force-vs-closed-form deviation, where a closed form
    /// exists for the scenario.
    pub max_discrepancy: Option<f64>,
    /// Echoed parameters, in a fixed order.
    pub parameters: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(scenario: &str) -> Self {
        Metadata {
            scenario: scenario.into(),
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            max_discrepancy: None,
            parameters: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesOutput {
    pub metadata: Metadata,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!(
                "format must be csv or json, got {other}"
            ))),
        }
    }
}

/// 12-significant-digit rendering: plain decimal in a wide central range,
/// scientific notation outside it. Deterministic for every input.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if (1e-4..1e12).contains(&mag) {
        let exp = mag.log10().floor() as i32;
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// Exact hexadecimal rendering of a finite f64 (round-trips bit-for-bit).
pub fn hex_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0x0p+0".into()
        } else {
            "0x0p+0".into()
        };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & 0xf_ffff_ffff_ffff;
    if raw_exp == 0 {
        // Subnormal: leading digit 0, exponent fixed at -1022.
        format!("{sign}0x0.{mantissa:013x}p-1022")
    } else {
        let exp = raw_exp - 1023;
        let e_sign = if exp >= 0 { "+" } else { "" };
        format!("{sign}0x1.{mantissa:013x}p{e_sign}{exp}")
    }
}

/// Parse the output of [`hex_float`] back to the identical f64.
pub fn parse_hex_float(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("malformed hex float {s}"));
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (1u64, r),
        None => (0u64, s),
    };
    let rest = rest.strip_prefix("0x").ok_or_else(bad)?;
    let (lead, rest) = rest.split_at(1);
    let rest = rest.strip_prefix('.').unwrap_or(rest);
    let p = rest.find('p').ok_or_else(bad)?;
    let (mant_str, exp_str) = rest.split_at(p);
    let exp: i64 = exp_str[1..].parse().map_err(|_| bad())?;
    let mantissa = if mant_str.is_empty() {
        0
    } else {
        u64::from_str_radix(mant_str, 16).map_err(|_| bad())?
    };
    let bits = match lead {
        "0" => {
            if mantissa == 0 {
                sign << 63
            } else {
                // Subnormal.
                (sign << 63) | mantissa
            }
        }
        "1" => (sign << 63) | (((exp + 1023) as u64) << 52) | mantissa,
        _ => return Err(bad()),
    };
    Ok(f64::from_bits(bits))
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

impl SeriesOutput {
    fn validate(&self) -> Result<()> {
        if let Some(first) = self.columns.first() {
            let len = first.values.len();
            for c in &self.columns {
                if c.values.len() != len {
                    return Err(Error::Numeric(format!(
                        "column {} has {} value(s), expected {len}",
                        c.name,
                        c.values.len()
                    )));
                }
                if let Values::Reals(reals) = &c.values {
                    if let Some(bad) = reals.iter().find(|v| !v.is_finite()) {
                        return Err(Error::Numeric(format!(
                            "column {} contains a non-finite value {bad}",
                            c.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    /// CSV: header of column names, one row per index, newline-terminated.
    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in 0..self.rows() {
            for (i, c) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match &c.values {
                    Values::Ints(v) => {
                        let _ = write!(out, "{}", v[row]);
                    }
                    Values::Reals(v) => out.push_str(&format_sig12(v[row])),
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// JSON object {metadata, columns}; `hex_floats` adds an exact
    /// hex rendering alongside each real column.
    pub fn to_json(&self, hex_floats: bool) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        out.push_str("{\n  \"metadata\": {\n");
        let _ = write!(
            out,
            "    \"scenario\": \"{}\",\n    \"artifact_version\": \"{}\",\n",
            json_escape(&self.metadata.scenario),
            json_escape(&self.metadata.artifact_version)
        );
        match self.metadata.max_discrepancy {
            Some(d) => {
                let _ = write!(out, "    \"max_discrepancy\": {},\n", format_sig12(d));
            }
            None => out.push_str("    \"max_discrepancy\": null,\n"),
        }
        out.push_str("    \"parameters\": {");
        for (i, (k, v)) in self.metadata.parameters.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{}\": \"{}\"", json_escape(k), json_escape(v));
        }
        out.push_str("}\n  },\n  \"columns\": [\n");
        for (ci, c) in self.columns.iter().enumerate() {
            let _ = write!(out, "    {{\"name\": \"{}\", \"values\": [", json_escape(&c.name));
            match &c.values {
                Values::Ints(v) => {
                    for (i, x) in v.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        let _ = write!(out, "{x}");
                    }
                }
                Values::Reals(v) => {
                    for (i, x) in v.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&format_sig12(*x));
                    }
                }
            }
            out.push(']');
            if hex_floats {
                if let Values::Reals(v) = &c.values {
                    out.push_str(", \"values_hex\": [");
                    for (i, x) in v.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        let _ = write!(out, "\"{}\"", hex_float(*x));
                    }
                    out.push(']');
                }
            }
            out.push('}');
            if ci + 1 < self.columns.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        Ok(out)
    }

    pub fn render(&self, format: Format, hex_floats: bool) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(hex_floats),
        }
    }
}

/// Write bytes atomically: a sibling temp file, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp_path, contents)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SeriesOutput {
        SeriesOutput {
            metadata: Metadata::new("sample"),
            columns: vec![
                Column::ints("n", vec![0, 1, 2]),
                Column::reals("value", vec![0.0, 0.46899559358928116, 1.0]),
            ],
        }
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "n,value");
        assert!(csv.ends_with('\n'));
        assert_eq!(lines[2], "1,0.468995593589");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(0.46899559358928116), "0.468995593589");
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(-0.05), "-0.0500000000000");
        assert_eq!(format_sig12(3.5e-15), "3.50000000000e-15");
        assert_eq!(format_sig12(123.456), "123.456000000");
    }

    #[test]
    fn emission_is_byte_stable() {
        let a = sample().to_json(true).unwrap();
        let b = sample().to_json(true).unwrap();
        assert_eq!(a, b);
        assert_eq!(sample().to_csv().unwrap(), sample().to_csv().unwrap());
    }

    #[test]
    fn json_parses_and_carries_metadata() {
        let text = sample().to_json(false).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["metadata"]["scenario"], "sample");
        assert_eq!(v["columns"][0]["name"], "n");
        assert_eq!(v["columns"][1]["values"][2], 1.0);
    }

    #[test]
    fn hex_floats_round_trip_bit_for_bit() {
        let cases = [
            0.46899559358928116,
            1.0,
            -0.05,
            2.2250738585072014e-308, // smallest normal
            5e-324,                  // subnormal
            -0.0,
            0.0,
            1e300,
        ];
        for x in cases {
            let s = hex_float(x);
            let back = parse_hex_float(&s).unwrap();
            assert_eq!(x.to_bits(), back.to_bits(), "{x} -> {s} -> {back}");
        }
    }

    #[test]
    fn ragged_columns_are_rejected() {
        let s = SeriesOutput {
            metadata: Metadata::new("bad"),
            columns: vec![
                Column::ints("n", vec![0, 1]),
                Column::reals("v", vec![0.0]),
            ],
        };
        assert!(matches!(s.to_csv(), Err(Error::Numeric(_))));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let s = SeriesOutput {
            metadata: Metadata::new("bad"),
            columns: vec![Column::reals("v", vec![f64::NAN])],
        };
        assert!(matches!(s.to_csv(), Err(Error::Numeric(_))));
    }
}

//! CSV and JSON serialisation of sweep results.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that files round-trip exactly and are byte-identical across runs.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::ser::Formatter;

use super::curve::BerCurve;
use super::sweep::SweepResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "detector,snr_db,bits,errors,ber,ci_low,ci_high";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(curves: &[BerCurve]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in curves {
        for p in &c.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.detector,
                sci(p.snr_db),
                p.bits,
                p.errors,
                sci(p.ber),
                sci(p.ci_low),
                sci(p.ci_high)
            )
            .expect("writing to a String");
        }
    }
    out
}

/// Compact JSON whose floats use 17 significant digits.
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn render(result: &SweepResult, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv(&result.curves)),
        OutputFormat::Json => to_json(result),
    }
}

pub fn emit_results(result: &SweepResult, path: &Path, format: OutputFormat) -> Result<()> {
    let text = render(result, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{BerPoint, SweepConfig};

    fn result() -> SweepResult {
        SweepResult {
            config: SweepConfig {
                snr_db: vec![1.0],
                detectors: vec!["zf".into()],
                ..SweepConfig::default()
            },
            curves: vec![BerCurve {
                detector: "zf".into(),
                points: vec![BerPoint::from_counts(1.0, 3, 762, 17)],
                error: None,
            }],
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_row_format() {
        let csv = to_csv(&result().curves);
        let row = csv.lines().nth(1).unwrap();
        assert!(row.starts_with("zf,1.0000000000000000e0,762,17,"));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_round_trip() {
        let r = result();
        let text = to_json(&r).unwrap();
        assert!(text.ends_with('\n'));
        let back: SweepResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(text.contains("\"seed\":1"));
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}

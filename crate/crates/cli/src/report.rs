//! Deterministic JSON and CSV emission.

use serde_json::ser::Formatter;
use serde_json::Value;
use std::io;

/// Compact JSON with every float written as `{:.16e}` (17 significant digits).
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Object keys come out sorted because `serde_json::Map` is a BTreeMap here.
pub fn emit_json(report: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    serde::Serialize::serialize(report, &mut ser).expect("in-memory write");
    out.push(b'\n');
    out
}

pub const ANGLE_CSV_HEADER: &str = "x,y,cos_a1,cos_a2,cos_a3,cos_sq_alpha,metric_factor,gauss_curvature";

pub fn csv_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

/// One line per row, header first, rows in the given (row-major) order.
pub fn emit_csv(header: &str, rows: &[Vec<f64>]) -> Vec<u8> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| csv_float(*v)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s.into_bytes()
}

//! Deterministic JSON and CSV output with 17 significant digits per float.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{CharEscape, Formatter, PrettyFormatter};

use crate::error::Result;

/// `v` with 17 significant digits, e.g. `5.0000000000000000e-1`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }

    fn write_char_escape<W: ?Sized + Write>(&mut self, w: &mut W, e: CharEscape) -> io::Result<()> {
        self.0.write_char_escape(w, e)
    }
}

/// Pretty JSON in declaration order, floats at 17 significant digits,
/// newline-terminated. Non-finite floats become `null`.
pub fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Rows with a fixed header.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn csv_string<R: CsvRecord>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_file(path, &json_string(value)?)
}

pub fn write_csv<R: CsvRecord>(path: &Path, rows: &[R]) -> Result<()> {
    write_file(path, &csv_string(rows)?)
}

impl CsvRecord for crate::fit::CurveRow {
    fn header() -> &'static [&'static str] {
        &["width", "seed", "gauge_error", "l1_error", "fit_millis"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.width.to_string(),
            self.seed.to_string(),
            fmt_f64(self.gauge_error),
            fmt_f64(self.l1_error),
            self.fit_millis.to_string(),
        ]
    }
}

/// One gauge-norm computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub phi_kind: String,
    pub measure_id: String,
    pub norm_value: f64,
    pub modular_at_value: f64,
    pub iterations: usize,
}

impl CsvRecord for NormRow {
    fn header() -> &'static [&'static str] {
        &["phi_kind", "measure_id", "norm_value", "modular_at_value", "iterations"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.phi_kind.clone(),
            self.measure_id.clone(),
            fmt_f64(self.norm_value),
            fmt_f64(self.modular_at_value),
            self.iterations.to_string(),
        ]
    }
}

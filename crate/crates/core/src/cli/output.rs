//! CSV and JSON encodings of a [`PopulationSeries`].
//!
//! CSV: header `t,p_upper,p_middle,p_lower`, LF line endings, every value in
//! scientific notation with 17 significant digits so that parsing returns
//! the identical `f64`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::PopulationSeries;

pub const CSV_HEADER: &str = "t,p_upper,p_middle,p_lower";

pub fn write_csv(series: &PopulationSeries) -> String {
    let mut out = String::with_capacity(series.len() * 96 + 32);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (t, p) in series.rows() {
        out.push_str(&format!("{t:.16e},{:.16e},{:.16e},{:.16e}\n", p.upper, p.middle, p.lower));
    }
    out
}

pub fn read_csv(text: &str) -> Result<PopulationSeries> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::InvalidParameter(format!("unexpected CSV header {other:?}")));
        }
    }
    let mut series = PopulationSeries::default();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("CSV line {}: {e}", lineno + 2)))?;
        if fields.len() != 4 {
            return Err(Error::InvalidParameter(format!("CSV line {}: expected 4 fields", lineno + 2)));
        }
        series.times.push(fields[0]);
        series.p_upper.push(fields[1]);
        series.p_middle.push(fields[2]);
        series.p_lower.push(fields[3]);
    }
    Ok(series)
}

#[derive(Serialize)]
struct JsonDocument<'a, P: Serialize> {
    params: &'a P,
    t: &'a [f64],
    p_upper: &'a [f64],
    p_middle: &'a [f64],
    p_lower: &'a [f64],
}

/// `{"params": {...}, "t": [...], "p_upper": [...], ...}`, pretty-printed
/// with a trailing newline.
pub fn write_json<P: Serialize>(params: &P, series: &PopulationSeries) -> String {
    let doc = JsonDocument {
        params,
        t: &series.times,
        p_upper: &series.p_upper,
        p_middle: &series.p_middle,
        p_lower: &series.p_lower,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("finite floats serialize");
    s.push('\n');
    s
}

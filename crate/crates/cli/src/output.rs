//! CSV rendering.

use std::fmt::Write;

use gainwalk::{TimeSeries, VertexId};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(n: usize) -> String {
    let mut line = String::from("t");
    for v in 0..n {
        line.push(',');
        line.push_str(&VertexId(v).column_name());
    }
    line
}

/// Header plus one line per `(t, distribution)` row, LF terminated.
pub fn rows_csv(n: usize, rows: &[(f64, Vec<f64>)]) -> String {
    let mut out = header(n);
    out.push('\n');
    for (t, row) in rows {
        out.push_str(&fmt_f64(*t));
        for p in row {
            write!(out, ",{}", fmt_f64(*p)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn time_series_csv(ts: &TimeSeries) -> String {
    let n = ts.probabilities.first().map_or(0, Vec::len);
    let mut out = header(n);
    out.push('\n');
    for (t, row) in ts.t_grid.iter().zip(&ts.probabilities) {
        out.push_str(&fmt_f64(*t));
        for p in row {
            write!(out, ",{}", fmt_f64(*p)).unwrap();
        }
        out.push('\n');
    }
    out
}

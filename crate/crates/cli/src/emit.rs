//! Deterministic text emission: CSV with '.' decimals, '\n' newlines, and a
//! header row; JSON as a single object. Every numeric field is printed with
//! 17 significant digits so identical inputs yield identical bytes.

use flc_core::series::{FractalSeries, FractalSeries2D};
use flc_core::solvers::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn json_array(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| fmt_real(v)).collect();
    format!("[{}]", inner.join(","))
}

/// One named field, e.g. a scalar result.
pub fn scalar(format: Format, name: &str, value: f64) -> String {
    match format {
        Format::Csv => format!("{name}\n{}\n", fmt_real(value)),
        Format::Json => format!("{{\"{name}\":{}}}\n", fmt_real(value)),
    }
}

/// A single-row record of named numeric/boolean/integer columns.
pub enum Field {
    Real(f64),
    Int(u64),
    Bool(bool),
}

impl Field {
    fn text(&self) -> String {
        match self {
            Field::Real(v) => fmt_real(*v),
            Field::Int(n) => n.to_string(),
            Field::Bool(b) => fmt_bool(*b).to_string(),
        }
    }
}

pub fn record(format: Format, fields: &[(&str, Field)]) -> String {
    match format {
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|(n, _)| *n).collect();
            let row: Vec<String> = fields.iter().map(|(_, f)| f.text()).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        Format::Json => {
            let body: Vec<String> =
                fields.iter().map(|(n, f)| format!("\"{n}\":{}", f.text())).collect();
            format!("{{{}}}\n", body.join(","))
        }
    }
}

/// A two-column numeric table; JSON renders it as two parallel arrays plus
/// optional boolean annotations.
pub fn table2(
    format: Format,
    names: (&str, &str),
    rows: impl Iterator<Item = (f64, f64)>,
    extra: &[(&str, bool)],
) -> String {
    match format {
        Format::Csv => {
            let mut out = format!("{},{}\n", names.0, names.1);
            for (a, b) in rows {
                out.push_str(&fmt_real(a));
                out.push(',');
                out.push_str(&fmt_real(b));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (a, b) in rows {
                left.push(a);
                right.push(b);
            }
            let mut body = format!(
                "\"{}\":{},\"{}\":{}",
                names.0,
                json_array(&left),
                names.1,
                json_array(&right)
            );
            for (name, value) in extra {
                body.push_str(&format!(",\"{name}\":{}", fmt_bool(*value)));
            }
            format!("{{{body}}}\n")
        }
    }
}

/// An indexed coefficient list, CSV as (k, value) rows.
pub fn indexed(format: Format, name: &str, values: &[f64]) -> String {
    match format {
        Format::Csv => {
            let mut out = format!("k,{name}\n");
            for (k, &v) in values.iter().enumerate() {
                out.push_str(&format!("{k},{}\n", fmt_real(v)));
            }
            out
        }
        Format::Json => format!("{{\"{name}\":{}}}\n", json_array(values)),
    }
}

pub fn series(format: Format, s: &FractalSeries<f64>) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("k,coeff\n");
            for (k, &c) in s.coeffs().iter().enumerate() {
                out.push_str(&format!("{k},{}\n", fmt_real(c)));
            }
            out
        }
        Format::Json => format!(
            "{{\"alpha\":{},\"x0\":{},\"coeffs\":{}}}\n",
            fmt_real(s.order().alpha()),
            fmt_real(s.x0()),
            json_array(s.coeffs())
        ),
    }
}

pub fn series2d(format: Format, s: &FractalSeries2D<f64>) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("i,j,coeff\n");
            for (total, row) in s.coeffs().iter().enumerate() {
                for (i, &c) in row.iter().enumerate() {
                    let j = total - i;
                    out.push_str(&format!("{i},{j},{}\n", fmt_real(c)));
                }
            }
            out
        }
        Format::Json => {
            let rows: Vec<String> = s.coeffs().iter().map(|row| json_array(row)).collect();
            let (x0, y0) = s.center();
            format!(
                "{{\"alpha\":{},\"x0\":{},\"y0\":{},\"coeffs\":[{}]}}\n",
                fmt_real(s.order().alpha()),
                fmt_real(x0),
                fmt_real(y0),
                rows.join(",")
            )
        }
    }
}

/// Space-time grid: CSV header carries the x nodes, each row starts with its
/// t node, values run in row-major time order.
pub fn grid(format: Format, alpha: f64, g: &GridFunction<f64>) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("t");
            for &x in &g.x_nodes {
                out.push(',');
                out.push_str(&fmt_real(x));
            }
            out.push('\n');
            for (row, &t) in g.values.iter().zip(&g.t_nodes) {
                out.push_str(&fmt_real(t));
                for &v in row {
                    out.push(',');
                    out.push_str(&fmt_real(v));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<String> = g.values.iter().map(|row| json_array(row)).collect();
            format!(
                "{{\"alpha\":{},\"x_nodes\":{},\"t_nodes\":{},\"values\":[{}]}}\n",
                fmt_real(alpha),
                json_array(&g.x_nodes),
                json_array(&g.t_nodes),
                rows.join(",")
            )
        }
    }
}

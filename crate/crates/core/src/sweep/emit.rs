use std::io::Write;

use serde_json::{Map, Value};

use super::{Format, Row, SweepResult};
use crate::engine::REPORTED_LEVELS;
use crate::error::{Error, Result};

const PAULI_REST: [(&str, usize, usize); 12] = [
    ("g_Ix", 0, 1),
    ("g_Iy", 0, 2),
    ("g_Iz", 0, 3),
    ("g_xI", 1, 0),
    ("g_xy", 1, 2),
    ("g_xz", 1, 3),
    ("g_yI", 2, 0),
    ("g_yx", 2, 1),
    ("g_yz", 2, 3),
    ("g_zI", 3, 0),
    ("g_zx", 3, 1),
    ("g_zy", 3, 2),
];

/// Column names in output order.
pub fn columns() -> Vec<String> {
    let mut c: Vec<String> = ["axis_value", "gamma", "epsilon", "Delta", "omega_q", "Delta_e", "alpha_r", "g_yy", "g_zz", "g_xx"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    c.extend(PAULI_REST.iter().map(|p| p.0.to_string()));
    c.extend(
        [
            "g_qr",
            "g1_qq_analytic",
            "g1_qr_analytic",
            "g2_qq_analytic",
            "residual",
            "flags",
            "offset",
            "omega_r",
            "g_counter",
            "phi01",
            "phi_star",
            "alpha_r_single",
            "min_singular",
            "gap",
            "unitarity",
            "intertwining",
            "spectrum_error",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    c.extend((0..REPORTED_LEVELS).map(|k| format!("E{k}")));
    c
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

fn num(x: Option<f64>) -> Cell {
    match x {
        Some(v) if v.is_finite() => Cell::Num(v),
        _ => Cell::Missing,
    }
}

/// Cells of one row, aligned with [`columns`].
pub fn row_values(row: &Row) -> Vec<Cell> {
    let mut out = vec![Cell::Num(row.axis_value), Cell::Num(row.gamma)];
    let r = match &row.outcome {
        Ok(r) => r,
        Err(_) => {
            let mut cells = out;
            let n = columns().len();
            cells.resize(n, Cell::Missing);
            let at = columns().iter().position(|c| c == "flags").unwrap();
            cells[at] = Cell::Text(row.flags().join(";"));
            return cells;
        }
    };
    let p = r.pauli.as_ref();
    let f = r.fit.as_ref();
    let g = |a: usize, b: usize| num(p.map(|p| p.coeffs[a][b]));
    out.extend([num(Some(r.epsilon)), num(Some(r.delta)), num(Some(r.omega_q)), num(Some(r.delta_e)), num(Some(r.alpha_r))]);
    out.extend([g(2, 2), g(3, 3), g(1, 1)]);
    out.extend(PAULI_REST.iter().map(|&(_, a, b)| g(a, b)));
    out.extend([
        num(f.map(|f| f.g)),
        num(r.analytics.g1_qq),
        num(r.analytics.g1_qr),
        num(r.analytics.g2_qq),
        num(f.map(|f| f.relative_residual)),
        Cell::Text(r.flags.join(";")),
        num(p.map(|p| p.offset()).or(f.map(|f| f.coeff("II")))),
        num(f.map(|f| f.omega_r)),
        num(f.filter(|f| f.counter_identifiable).map(|f| f.g_counter)),
        num(Some(r.phi01)),
        num(r.phi_star),
        num(Some(r.alpha_r_single)),
        num(Some(r.min_singular)),
        num(Some(r.gap)),
        num(Some(r.integrity.unitarity)),
        num(Some(r.integrity.intertwining)),
        num(Some(r.integrity.spectrum)),
    ]);
    out.extend((0..REPORTED_LEVELS).map(|k| num(r.energies.get(k).copied())));
    out
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn emit_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(columns()).map_err(csv_err)?;
    for row in &result.rows {
        let cells: Vec<String> = row_values(row)
            .into_iter()
            .map(|c| match c {
                Cell::Num(v) => format!("{v:.16e}"),
                Cell::Text(s) => s,
                Cell::Missing => String::new(),
            })
            .collect();
        w.write_record(&cells).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

fn toml_to_json(v: &toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s.clone()),
        toml::Value::Integer(i) => Value::from(*i),
        toml::Value::Float(f) => serde_json::Number::from_f64(*f).map_or(Value::Null, Value::Number),
        toml::Value::Boolean(b) => Value::Bool(*b),
        other => Value::String(other.to_string()),
    }
}

pub fn to_json(result: &SweepResult) -> Value {
    let cols = columns();
    let mut config = Map::new();
    config.insert("axis".into(), Value::String(result.config.sweep.axis.name().into()));
    for (k, v) in &result.config.echo {
        config.insert(k.clone(), toml_to_json(v));
    }
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for (name, cell) in cols.iter().zip(row_values(row)) {
                let v = match cell {
                    Cell::Num(x) => serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number),
                    Cell::Text(_) => Value::Array(row.flags().into_iter().map(Value::String).collect()),
                    Cell::Missing => Value::Null,
                };
                m.insert(name.clone(), v);
            }
            Value::Object(m)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("config".into(), Value::Object(config));
    doc.insert("rows".into(), Value::Array(rows));
    Value::Object(doc)
}

pub fn emit_json<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &to_json(result)).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| Error::Io(e.to_string()))
}

pub fn emit<W: Write>(result: &SweepResult, format: Format, out: W) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::Config("nothing to emit".into()));
    }
    match format {
        Format::Csv => emit_csv(result, out),
        Format::Json => emit_json(result, out),
    }
}

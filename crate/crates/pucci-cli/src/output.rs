//! Deterministic table emission.
//!
//! CSV is the default; JSON wraps the same rows in `{meta, rows}`.  Every
//! floating-point value is printed with 17 significant digits so files
//! round-trip bit-exactly.

use std::io::{self, Write};
use std::path::PathBuf;

use serde::Serialize;

use crate::AppError;

/// 17 significant digits, round-trip safe for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter printing every f64 with 17 significant digits.
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct Meta {
    pub command: String,
    pub version: String,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub lambda_hi: f64,
    pub dim: u32,
    pub operator: String,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_derivative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination_reason: Option<String>,
}

impl Meta {
    pub fn new(
        command: &str,
        params: &pucci::PucciParams,
        integ: &pucci::IntegratorConfig,
    ) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            lambda: params.lambda_lo,
            lambda_hi: params.lambda_hi,
            dim: params.dim,
            operator: match params.operator {
                pucci::OperatorKind::Max => "max".to_string(),
                pucci::OperatorKind::Min => "min".to_string(),
            },
            rel_tol: integ.rel_tol,
            abs_tol: integ.abs_tol,
            max_step: integ.max_step,
            seed: None,
            nonlinearity: None,
            mu: None,
            boundary_derivative: None,
            termination_reason: None,
        }
    }
}

/// One table cell; integers and labels print verbatim, floats at 17 digits.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Label(String),
    Int(i64),
    Real(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Label(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Real(v) => fmt_f64(*v),
        }
    }
}

/// A finished document: fixed header, rows, optional trailing comments.
#[derive(Debug)]
pub struct Table {
    pub meta: Meta,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Comment lines placed before the header in CSV (`# key=value`).
    pub preamble: Vec<String>,
    /// Comment lines placed after the rows in CSV.
    pub trailing: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.preamble {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for line in &self.trailing {
            out.push_str(&format!("# {line}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            meta: &'a Meta,
            rows: Vec<serde_json::Map<String, serde_json::Value>>,
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    let value = match cell {
                        Cell::Label(s) => serde_json::Value::String(s.clone()),
                        Cell::Int(i) => serde_json::Value::from(*i),
                        Cell::Real(v) => serde_json::Number::from_f64(*v)
                            .map(serde_json::Value::Number)
                            .unwrap_or(serde_json::Value::Null),
                    };
                    obj.insert((*name).to_string(), value);
                }
                obj
            })
            .collect();
        let doc = Doc {
            meta: &self.meta,
            rows,
        };
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
        doc.serialize(&mut ser).expect("in-memory serialization");
        buf.push(b'\n');
        String::from_utf8(buf).expect("json is utf8")
    }

    pub fn emit(&self, format: crate::args::FormatArg, out: &Option<PathBuf>) -> Result<(), AppError> {
        let text = match format {
            crate::args::FormatArg::Csv => self.to_csv(),
            crate::args::FormatArg::Json => self.to_json(),
        };
        match out {
            None => {
                print!("{text}");
                Ok(())
            }
            Some(path) => std::fs::write(path, text).map_err(|e| {
                AppError::Usage(format!("cannot write output file {}: {e}", path.display()))
            }),
        }
    }
}

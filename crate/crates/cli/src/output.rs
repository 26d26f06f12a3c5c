//! Report tables, CSV/JSON encoding and the run manifest.

use std::io::Write;

use serde::Serialize;
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

use crate::scenario::Format;
use crate::schema::Command;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map(Cell::Float).unwrap_or(Cell::Empty)
    }

    /// Floats carry 17 significant digits so values survive a round trip.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Json::Number).unwrap_or(Json::Null),
            Cell::Int(v) => Json::from(*v),
            Cell::Bool(v) => Json::from(*v),
            Cell::Text(v) => Json::from(v.as_str()),
            Cell::Empty => Json::Null,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_json(&self) -> Json {
        Json::Array(
            self.rows
                .iter()
                .map(|row| Json::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect()))
                .collect(),
        )
    }
}

/// Result of one command: always a table, optionally a richer JSON
/// document used for `--format json`, plus notes for stderr.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub table: Table,
    pub json: Option<Json>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn table(table: Table) -> Self {
        Self { table, json: None, notes: Vec::new() }
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>, std::io::Error> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.columns)?;
                for row in &self.table.rows {
                    w.write_record(row.iter().map(Cell::to_csv))?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
            Format::Json => {
                let doc = self.json.clone().unwrap_or_else(|| self.table.to_json());
                let mut bytes = serde_json::to_vec_pretty(&doc)?;
                bytes.write_all(b"\n")?;
                Ok(bytes)
            }
        }
    }
}

/// Provenance written next to each output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config_sha256: String,
    pub seed: u64,
    pub format: Format,
    pub output: String,
    pub output_sha256: String,
    pub grid_points: usize,
    pub rows: usize,
    pub columns: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = Cell::Float(v).to_csv();
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(Cell::Empty.to_csv(), "");
    }

    #[test]
    fn encodings() {
        let r = Report::table(Table {
            columns: vec!["x".into(), "ok".into()],
            rows: vec![vec![Cell::Float(0.5), Cell::Bool(true)], vec![Cell::Float(f64::NAN), Cell::Empty]],
        });
        let csv = String::from_utf8(r.encode(Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, "x,ok\n5.0000000000000000e-1,true\nNaN,\n");
        let json: Json = serde_json::from_slice(&r.encode(Format::Json).unwrap()).unwrap();
        assert_eq!(json[0]["x"], 0.5);
        assert!(json[1]["x"].is_null());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

use std::fmt::Write as _;

use clap::ValueEnum;
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn as_string<S: serde::Serializer, T: ToString>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn as_strings<S: serde::Serializer, T: ToString>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

#[derive(Serialize)]
pub struct CountDoc {
    pub d: u32,
    pub delta: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(serialize_with = "as_string")]
    pub value: BigUint,
}

#[derive(Serialize)]
pub struct TableEntry {
    pub d: u32,
    pub delta: u32,
    #[serde(serialize_with = "as_string")]
    pub value: BigUint,
}

#[derive(Serialize)]
pub struct TableDoc {
    pub dmax: u32,
    pub deltamax: u32,
    pub entries: Vec<TableEntry>,
}

impl TableDoc {
    pub fn from_rows(dmax: u32, deltamax: u32, rows: Vec<Vec<BigUint>>) -> Self {
        let entries = rows
            .into_iter()
            .zip(1..)
            .flat_map(|(row, d)| {
                row.into_iter()
                    .zip(0..)
                    .map(move |(value, delta)| TableEntry { d, delta, value })
            })
            .collect();
        TableDoc {
            dmax,
            deltamax,
            entries,
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("d,delta,value\n");
        for e in &self.entries {
            writeln!(out, "{},{},{}", e.d, e.delta, e.value).unwrap();
        }
        out
    }
}

#[derive(Serialize)]
pub struct ThresholdDoc {
    pub delta: u32,
    pub threshold: u32,
}

#[derive(Serialize)]
pub struct BellDoc {
    pub delta: usize,
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Serialize)]
pub struct InvariantsDoc {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub t: i64,
}

#[derive(Serialize)]
pub struct PredictDoc {
    pub invariants: InvariantsDoc,
    pub order: usize,
    pub d_used: Vec<u32>,
    #[serde(serialize_with = "as_strings")]
    pub values: Vec<BigInt>,
}

#[derive(Serialize)]
pub struct CacheDoc {
    pub path: String,
    pub version: &'static str,
    pub entries: usize,
    pub bytes: u64,
}

#[derive(Serialize)]
pub struct ErrorDoc<'a> {
    pub error: &'a str,
    pub message: String,
    pub exit_code: u8,
}

/// Anything the CLI can print.
pub enum Document {
    Table(TableDoc),
    /// Compact JSON, fields in declaration order.
    Json(String),
}

impl Document {
    pub fn json<T: Serialize>(doc: &T) -> Result<Self, CliError> {
        to_json(doc).map(Document::Json)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match (self, format) {
            (Document::Table(t), Format::Csv) => Ok(t.to_csv()),
            (_, Format::Csv) => Err(CliError::UnsupportedFormat("csv")),
            (Document::Table(t), Format::Json) => to_json(t),
            (Document::Json(s), Format::Json) => Ok(s.clone()),
        }
    }
}

fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string(doc).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_2_1() -> TableDoc {
        let rows = vec![vec![1u32.into(), 0u32.into()], vec![1u32.into(), 3u32.into()]];
        TableDoc::from_rows(2, 1, rows)
    }

    #[test]
    fn table_csv_has_header_and_four_rows() {
        let csv = Document::Table(table_2_1()).render(Format::Csv).unwrap();
        assert_eq!(csv, "d,delta,value\n1,0,1\n1,1,0\n2,0,1\n2,1,3\n");
    }

    #[test]
    fn csv_only_for_tables() {
        let doc = Document::json(&ThresholdDoc { delta: 3, threshold: 3 }).unwrap();
        assert!(matches!(doc.render(Format::Csv), Err(CliError::UnsupportedFormat(_))));
    }

    #[test]
    fn json_is_stable() {
        let doc = Document::json(&CountDoc {
            d: 3,
            delta: 1,
            alpha: None,
            beta: Some("2".into()),
            value: 12u32.into(),
        })
        .unwrap();
        let a = doc.render(Format::Json).unwrap();
        assert_eq!(a, "{\"d\":3,\"delta\":1,\"beta\":\"2\",\"value\":\"12\"}\n");
        assert_eq!(a, doc.render(Format::Json).unwrap());
    }
}

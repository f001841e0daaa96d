//! CSV and JSON emission of sweep datasets.
//!
//! CSV floats use 17 significant digits in scientific notation, enough to
//! round-trip every f64. Optional columns are left empty; flags are joined
//! with `;`. JSON wraps the rows with a metadata object.

use serde::{Deserialize, Serialize};

use crate::search::SearchBounds;
use crate::sweep::{DatasetRow, Figure, SweepSpec};
use crate::transfer::{TransferParams, HBAR, K_B};

pub const CSV_HEADER: [&str; 9] = ["l", "p", "p_prime", "gamma", "xi", "n", "lambda", "fidelity", "flags"];

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed dataset: {0}")]
    Malformed(String),
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn to_csv(rows: &[DatasetRow]) -> Result<String, OutputError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.l.to_string(),
            r.p.to_string(),
            r.p_prime.to_string(),
            format_float(r.gamma),
            format_float(r.xi),
            format_opt(r.n),
            format_opt(r.lambda),
            format_opt(r.fidelity),
            r.flags.join(";"),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| OutputError::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| OutputError::Malformed(e.to_string()))
}

pub fn from_csv(text: &str) -> Result<Vec<DatasetRow>, OutputError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(OutputError::Malformed("unexpected header".into()));
    }
    let bad = |what: &str, v: &str| OutputError::Malformed(format!("bad {what} `{v}`"));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let int = |i: usize| get(i).parse::<i64>().map_err(|_| bad(CSV_HEADER[i], get(i)));
        let real = |i: usize| get(i).parse::<f64>().map_err(|_| bad(CSV_HEADER[i], get(i)));
        let opt = |i: usize| if get(i).is_empty() { Ok(None) } else { real(i).map(Some) };
        let flags = get(8);
        rows.push(DatasetRow {
            l: int(0)?.try_into().map_err(|_| bad("l", get(0)))?,
            p: int(1)?.try_into().map_err(|_| bad("p", get(1)))?,
            p_prime: int(2)?.try_into().map_err(|_| bad("p_prime", get(2)))?,
            gamma: real(3)?,
            xi: real(4)?,
            n: opt(5)?,
            lambda: opt(6)?,
            fidelity: opt(7)?,
            flags: if flags.is_empty() {
                Vec::new()
            } else {
                flags.split(';').map(str::to_string).collect()
            },
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub hbar_j_s: f64,
    pub k_b_j_per_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub figure: Figure,
    pub config_hash: String,
    pub constants: Constants,
    pub gamma: f64,
    pub l_values: Vec<i32>,
    pub bounds: SearchBounds,
    /// Rates in rad/s.
    pub transfer: Option<TransferParams>,
}

impl Metadata {
    pub fn new(spec: &SweepSpec, config_hash: String) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            figure: spec.figure,
            config_hash,
            constants: Constants {
                hbar_j_s: HBAR,
                k_b_j_per_k: K_B,
            },
            gamma: spec.gamma.get(),
            l_values: spec.l_values.clone(),
            bounds: spec.bounds,
            transfer: spec.transfer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub metadata: Metadata,
    pub rows: Vec<DatasetRow>,
}

pub fn to_json(dataset: &Dataset) -> Result<String, OutputError> {
    let mut s = serde_json::to_string_pretty(dataset)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Dataset, OutputError> {
    Ok(serde_json::from_str(text)?)
}

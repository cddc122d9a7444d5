//! Output files: a `#` metadata line followed by CSV or text.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
#[error("{path}: {message}")]
pub struct OutputError {
    pub path: String,
    pub message: String,
}

impl OutputError {
    pub fn new(path: &Path, message: impl ToString) -> Self {
        OutputError {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }
}

/// Provenance stamped on every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunMeta {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl RunMeta {
    pub fn new(config_hash: &str, seed: u64) -> Self {
        RunMeta {
            version: VERSION.to_string(),
            config_hash: config_hash.to_string(),
            seed,
        }
    }

    pub fn header_line(&self) -> String {
        format!("# newscast {} config_hash={} seed={}", self.version, self.config_hash, self.seed)
    }
}

/// Header line, column names, then one record per row. Column names come
/// from the row type, so an empty table still carries them.
pub fn write_csv<T: Serialize>(path: &Path, meta: &RunMeta, columns: &[&str], rows: &[T]) -> Result<(), OutputError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(meta.header_line().as_bytes());
    buf.push(b'\n');
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        w.write_record(columns).map_err(|e| OutputError::new(path, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| OutputError::new(path, e))?;
        }
        w.flush().map_err(|e| OutputError::new(path, e))?;
    }
    write_bytes(path, &buf)
}

pub fn write_text(path: &Path, meta: &RunMeta, body: &str) -> Result<(), OutputError> {
    let mut text = meta.header_line();
    text.push('\n');
    text.push_str(body);
    write_bytes(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| OutputError::new(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| OutputError::new(path, e))
}

/// Reads a CSV written by [`write_csv`], skipping `#` lines.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, OutputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| OutputError::new(path, e))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        out.push(rec.map_err(|e| OutputError::new(path, format!("record {}: {e}", i + 1)))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub article_id: String,
    pub sentence_index: usize,
    pub topic: String,
    pub country: String,
    pub score: f64,
    pub n_terms: usize,
}

pub const SCORE_COLUMNS: &[&str] = &["article_id", "sentence_index", "topic", "country", "score", "n_terms"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub country: String,
    pub name: String,
    pub frequency: String,
    pub period: String,
    pub value: Option<f64>,
}

pub const INDICATOR_COLUMNS: &[&str] = &["country", "name", "frequency", "period", "value"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InSampleCsvRow {
    pub country: String,
    pub indicator: String,
    pub horizon: u32,
    pub eta_hat: f64,
    pub std_err: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
}

pub const INSAMPLE_COLUMNS: &[&str] = &["country", "indicator", "horizon", "eta_hat", "std_err", "p_raw", "p_adjusted"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub model: String,
    pub country: String,
    pub target: String,
    pub horizon: u32,
    pub forecast_date: String,
    pub prediction: f64,
    pub realized: Option<f64>,
}

pub const FORECAST_COLUMNS: &[&str] = &["model", "country", "target", "horizon", "forecast_date", "prediction", "realized"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub country: String,
    pub sentiment: String,
    pub subset: String,
    pub p_value: f64,
}

pub const EVALUATION_COLUMNS: &[&str] = &["country", "sentiment", "subset", "p_value"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsfeRow {
    pub country: String,
    pub model: String,
    pub horizon: u32,
    pub msfe_ratio: f64,
}

pub const MSFE_COLUMNS: &[&str] = &["country", "model", "horizon", "msfe_ratio"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationRow {
    pub country: String,
    pub model: String,
    pub subset: String,
    pub midpoint: f64,
    pub target: String,
    pub statistic: f64,
    pub critical_value: f64,
}

pub const FLUCTUATION_COLUMNS: &[&str] = &["country", "model", "subset", "midpoint", "target", "statistic", "critical_value"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaRow {
    pub country: String,
    pub model: String,
    pub horizon: u32,
    pub p_value: f64,
}

pub const PA_COLUMNS: &[&str] = &["country", "model", "horizon", "p_value"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub country: String,
    pub quarter: String,
    pub release_date: String,
    pub value: Option<f64>,
}

pub const TARGET_COLUMNS: &[&str] = &["country", "quarter", "release_date", "value"];

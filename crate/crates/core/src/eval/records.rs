//! Forecast records and aligned loss differentials.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::calendar::Period;

pub const ARX: &str = "ARX";
pub const AVERAGE: &str = "AVERAGE";

/// `ARXS:<indicator>`.
pub fn arxs_name(indicator: &str) -> String {
    format!("ARXS:{indicator}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub model: String,
    pub country: String,
    pub target: Period,
    pub horizon: u32,
    pub forecast_date: NaiveDate,
    pub prediction: f64,
    pub realized: Option<f64>,
}

impl ForecastRecord {
    pub fn error(&self) -> Option<f64> {
        self.realized.map(|r| r - self.prediction)
    }
}

/// Canonical output order: country, model, horizon, target.
pub fn sort_records(records: &mut [ForecastRecord]) {
    records.sort_by(|a, b| {
        (&a.country, &a.model, a.horizon, a.target).cmp(&(&b.country, &b.model, b.horizon, b.target))
    });
}

/// Squared-error loss differentials `L_benchmark − L_model` for one country,
/// restricted to the targets where both models have a realized forecast at
/// every horizon in `horizons`, so all horizon vectors have equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPanel {
    pub model: String,
    pub benchmark: String,
    pub country: String,
    pub horizons: Vec<u32>,
    pub targets: Vec<Period>,
    /// One vector per horizon, aligned on `targets`.
    pub differentials: Vec<Vec<f64>>,
}


fn squared_errors(records: &[ForecastRecord], model: &str, country: &str) -> BTreeMap<(u32, Period), f64> {
    records
        .iter()
        .filter(|r| r.model == model && r.country == country)
        .filter_map(|r| r.error().map(|e| ((r.horizon, r.target), e * e)))
        .collect()
}

impl LossPanel {
    pub fn build(records: &[ForecastRecord], model: &str, benchmark: &str, country: &str, horizons: &[u32]) -> Result<Self, EvalError> {
        let m = squared_errors(records, model, country);
        let b = squared_errors(records, benchmark, country);
        let candidates: BTreeSet<Period> = m.keys().map(|(_, t)| *t).collect();
        let targets: Vec<Period> = candidates
            .into_iter()
            .filter(|t| horizons.iter().all(|h| m.contains_key(&(*h, *t)) && b.contains_key(&(*h, *t))))
            .collect();
        if targets.is_empty() {
            return Err(EvalError::Misaligned(format!("no common targets for {model} vs {benchmark} in {country}")));
        }
        let differentials = horizons
            .iter()
            .map(|h| targets.iter().map(|t| b[&(*h, *t)] - m[&(*h, *t)]).collect())
            .collect();
        Ok(LossPanel {
            model: model.to_string(),
            benchmark: benchmark.to_string(),
            country: country.to_string(),
            horizons: horizons.to_vec(),
            targets,
            differentials,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}


use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DailySentiment, IndicatorError};
use crate::calendar::{Frequency, Period};
use crate::stats::{mean, population_variance, sorted_sum};

/// A regular time series; `None` marks a period without observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub country: String,
    /// Topic or survey name.
    pub name: String,
    pub start: Period,
    pub values: Vec<Option<f64>>,
    pub standardized: bool,
}

impl IndicatorSeries {
    pub fn new(country: &str, name: &str, start: Period, values: Vec<Option<f64>>) -> Self {
        IndicatorSeries {
            country: country.to_string(),
            name: name.to_string(),
            start,
            values,
            standardized: false,
        }
    }

    /// Builds a regular series from strictly increasing points, filling gaps
    /// with missing values.
    pub fn from_points(
        country: &str,
        name: &str,
        points: &[(Period, Option<f64>)],
    ) -> Result<Self, IndicatorError> {
        let Some(&(start, _)) = points.first() else {
            return Err(IndicatorError::TooFewValues {
                name: name.to_string(),
                needed: 1,
                found: 0,
            });
        };
        let mut values = Vec::new();
        let mut prev: Option<Period> = None;
        for &(p, v) in points {
            if p.frequency() != start.frequency() || prev.is_some_and(|q| q >= p) {
                return Err(IndicatorError::Irregular {
                    name: name.to_string(),
                    period: p.to_string(),
                });
            }
            if let Some(q) = prev {
                for _ in 1..q.distance(p) {
                    values.push(None);
                }
            }
            values.push(v);
            prev = Some(p);
        }
        Ok(IndicatorSeries::new(country, name, start, values))
    }

    pub fn frequency(&self) -> Frequency {
        self.start.frequency()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> Period {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn periods(&self) -> impl Iterator<Item = Period> + '_ {
        (0..self.values.len()).map(|i| self.start.offset(i as i64))
    }

    pub fn get(&self, period: Period) -> Option<f64> {
        let i = self.start.distance(period);
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied().flatten()
    }

    /// Non-missing (period, value) pairs in order.
    pub fn observed(&self) -> Vec<(Period, f64)> {
        self.periods()
            .zip(&self.values)
            .filter_map(|(p, v)| v.map(|x| (p, x)))
            .collect()
    }

    /// Mean of the available values within each coarser period.
    pub fn aggregate_to(&self, freq: Frequency) -> IndicatorSeries {
        let mut buckets: BTreeMap<Period, Vec<f64>> = BTreeMap::new();
        for (p, v) in self.observed() {
            buckets.entry(p.to_frequency(freq)).or_default().push(v);
        }
        let start = self.start.to_frequency(freq);
        let end = self.end().to_frequency(freq);
        let values = Period::range_inclusive(start, end)
            .map(|p| {
                buckets.get_mut(&p).map(|v| {
                    let n = v.len() as f64;
                    sorted_sum(v) / n
                })
            })
            .collect();
        IndicatorSeries::new(&self.country, &self.name, start, values)
    }
}

/// Resamples one (country, topic) group of daily records: each period holds
/// the mean of its news days' means. Returns `None` for an empty input.
pub fn resample(daily: &[DailySentiment], freq: Frequency) -> Option<IndicatorSeries> {
    let first = daily.first()?;
    let mut buckets: BTreeMap<Period, Vec<f64>> = BTreeMap::new();
    for d in daily.iter().filter(|d| d.n_sentences > 0) {
        buckets
            .entry(Period::containing(d.date, freq))
            .or_default()
            .push(d.mean_score);
    }
    let start = *buckets.keys().next()?;
    let end = *buckets.keys().next_back()?;
    let values = Period::range_inclusive(start, end)
        .map(|p| {
            buckets.get_mut(&p).map(|v| {
                let n = v.len() as f64;
                sorted_sum(v) / n
            })
        })
        .collect();
    Some(IndicatorSeries::new(&first.country, &first.topic, start, values))
}

/// [`resample`] for every (country, topic) key, in key order.
pub fn resample_all(daily: &[DailySentiment], freq: Frequency) -> Vec<IndicatorSeries> {
    let mut groups: BTreeMap<(&str, &str), Vec<DailySentiment>> = BTreeMap::new();
    for d in daily {
        groups
            .entry((d.country.as_str(), d.topic.as_str()))
            .or_default()
            .push(d.clone());
    }
    groups.values().filter_map(|g| resample(g, freq)).collect()
}

/// Z-scores with the full-sample mean and population standard deviation.
pub fn standardize(series: &IndicatorSeries) -> Result<IndicatorSeries, IndicatorError> {
    let obs: Vec<f64> = series.values.iter().flatten().copied().collect();
    let label = || format!("{}/{}", series.country, series.name);
    if obs.len() < 2 {
        return Err(IndicatorError::TooFewValues {
            name: label(),
            needed: 2,
            found: obs.len(),
        });
    }
    let m = mean(&obs);
    let var = population_variance(&obs);
    if var <= f64::EPSILON * m.abs().max(1.0) * 1e-3 {
        return Err(IndicatorError::ZeroVariance { name: label() });
    }
    let sd = var.sqrt();
    let mut out = series.clone();
    out.values = series.values.iter().map(|v| v.map(|x| (x - m) / sd)).collect();
    out.standardized = true;
    Ok(out)
}

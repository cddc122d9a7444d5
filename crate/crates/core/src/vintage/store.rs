use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::VintageError;
use crate::calendar::{Frequency, Period};

/// One published value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub value: f64,
    pub release_date: NaiveDate,
    /// Release date imputed from the stylized calendar.
    pub pseudo: bool,
}

/// All releases of one series, per reference period in release order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VintageSeries {
    pub series_id: String,
    pub country: String,
    pub frequency: Frequency,
    /// Whether a release may precede the end of its period (surveys published
    /// within their own month).
    pub early_release_allowed: bool,
    releases: BTreeMap<Period, Vec<Observation>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotValue {
    pub value: f64,
    pub release_date: NaiveDate,
}

/// Latest known value per period at a given date.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Snapshot {
    pub values: BTreeMap<Period, SnapshotValue>,
}

impl Snapshot {
    pub fn get(&self, period: Period) -> Option<SnapshotValue> {
        self.values.get(&period).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn last_period(&self) -> Option<Period> {
        self.values.keys().next_back().copied()
    }

    /// The `n` most recent periods, newest first.
    pub fn latest(&self, n: usize) -> Vec<(Period, SnapshotValue)> {
        self.values.iter().rev().take(n).map(|(p, v)| (*p, *v)).collect()
    }
}

impl VintageSeries {
    pub fn new(series_id: &str, country: &str, frequency: Frequency) -> Self {
        VintageSeries {
            series_id: series_id.to_string(),
            country: country.to_string(),
            frequency,
            early_release_allowed: false,
            releases: BTreeMap::new(),
        }
    }

    /// Adds a release. Releases of the same period may arrive in any order
    /// but must have distinct dates.
    pub fn insert(&mut self, period: Period, obs: Observation) -> Result<(), VintageError> {
        if period.frequency() != self.frequency {
            return Err(VintageError::FrequencyMismatch {
                series: self.series_id.clone(),
                freq: period.frequency(),
            });
        }
        if !self.early_release_allowed && obs.release_date < period.end_date() {
            return Err(VintageError::EarlyRelease {
                series: self.series_id.clone(),
                period: period.to_string(),
                release: obs.release_date.to_string(),
            });
        }
        let list = self.releases.entry(period).or_default();
        match list.binary_search_by_key(&obs.release_date, |o| o.release_date) {
            Ok(_) => Err(VintageError::DuplicateRelease {
                series: self.series_id.clone(),
                period: period.to_string(),
                release: obs.release_date.to_string(),
            }),
            Err(pos) => {
                list.insert(pos, obs);
                Ok(())
            }
        }
    }

    pub fn releases(&self) -> impl Iterator<Item = (Period, &Observation)> + '_ {
        self.releases.iter().flat_map(|(p, v)| v.iter().map(move |o| (*p, o)))
    }

    pub fn periods(&self) -> impl Iterator<Item = Period> + '_ {
        self.releases.keys().copied()
    }

    pub fn releases_of(&self, period: Period) -> &[Observation] {
        self.releases.get(&period).map_or(&[], Vec::as_slice)
    }

    pub fn first_release(&self, period: Period) -> Option<Observation> {
        self.releases_of(period).first().copied()
    }

    /// Every period's latest release on or before `date`.
    pub fn as_of(&self, date: NaiveDate) -> Snapshot {
        let mut values = BTreeMap::new();
        for (p, list) in &self.releases {
            let k = list.partition_point(|o| o.release_date <= date);
            if k > 0 {
                let o = list[k - 1];
                values.insert(
                    *p,
                    SnapshotValue {
                        value: o.value,
                        release_date: o.release_date,
                    },
                );
            }
        }
        Snapshot { values }
    }

    /// Final (latest) value of every period.
    pub fn latest(&self) -> Snapshot {
        self.as_of(NaiveDate::MAX)
    }

    /// True when `value` was released for `period` on exactly `release`.
    pub fn has_release(&self, period: Period, release: NaiveDate, value: f64) -> bool {
        self.releases_of(period)
            .iter()
            .any(|o| o.release_date == release && o.value.to_bits() == value.to_bits())
    }

    pub fn pseudo_count(&self) -> usize {
        self.releases().filter(|(_, o)| o.pseudo).count()
    }

    /// Mutable access for tests that corrupt a release date.
    pub fn observations_mut(&mut self, period: Period) -> Option<&mut Vec<Observation>> {
        self.releases.get_mut(&period)
    }
}

/// Series keyed by (country, series_id).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VintageStore {
    series: BTreeMap<(String, String), VintageSeries>,
}

impl VintageStore {
    pub fn insert_series(&mut self, series: VintageSeries) {
        self.series
            .insert((series.country.clone(), series.series_id.clone()), series);
    }

    pub fn get(&self, country: &str, series_id: &str) -> Option<&VintageSeries> {
        self.series.get(&(country.to_string(), series_id.to_string()))
    }

    pub fn get_mut(&mut self, country: &str, series_id: &str) -> Option<&mut VintageSeries> {
        self.series.get_mut(&(country.to_string(), series_id.to_string()))
    }

    /// Series for `(country, series_id)`, created empty if absent.
    pub fn entry(&mut self, country: &str, series_id: &str, frequency: Frequency) -> &mut VintageSeries {
        self.series
            .entry((country.to_string(), series_id.to_string()))
            .or_insert_with(|| VintageSeries::new(series_id, country, frequency))
    }

    pub fn iter(&self) -> impl Iterator<Item = &VintageSeries> + '_ {
        self.series.values()
    }

    pub fn countries(&self) -> Vec<String> {
        let mut c: Vec<String> = self.series.keys().map(|(c, _)| c.clone()).collect();
        c.dedup();
        c
    }

    pub fn series_ids(&self, country: &str) -> Vec<String> {
        self.series
            .keys()
            .filter(|(c, _)| c == country)
            .map(|(_, s)| s.clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

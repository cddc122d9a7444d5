use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{transform, TransformKind, VintageError, VintageSeries};
use crate::calendar::Period;

/// Forecast horizons in days before the target release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonGrid {
    pub horizons: Vec<u32>,
    /// Horizons up to and including this value are nowcasts.
    pub nowcast_threshold: u32,
}

impl Default for HorizonGrid {
    fn default() -> Self {
        HorizonGrid {
            horizons: (1..=33).map(|k| 15 * k).collect(),
            nowcast_threshold: 165,
        }
    }
}

impl HorizonGrid {
    pub fn is_nowcast(&self, h: u32) -> bool {
        h <= self.nowcast_threshold
    }

    pub fn nowcast(&self) -> Vec<u32> {
        self.horizons.iter().copied().filter(|&h| self.is_nowcast(h)).collect()
    }

    pub fn forecast(&self) -> Vec<u32> {
        self.horizons.iter().copied().filter(|&h| !self.is_nowcast(h)).collect()
    }

    pub fn len(&self) -> usize {
        self.horizons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horizons.is_empty()
    }
}

/// The GDP figure released for quarter `quarter` on `release_date`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRelease {
    pub country: String,
    pub quarter: Period,
    pub release_date: NaiveDate,
    /// Flash growth; absent for calendar-only entries.
    pub value: Option<f64>,
}

/// `(h, release_date − h)` for every grid horizon.
pub fn horizon_dates(target: &TargetRelease, grid: &HorizonGrid) -> Vec<(u32, NaiveDate)> {
    grid.horizons
        .iter()
        .map(|&h| (h, target.release_date - Duration::days(i64::from(h))))
        .collect()
}

/// Release lags used when a file gives no release date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StylizedCalendar {
    /// Days after quarter end for GDP.
    pub gdp_lag_days: i64,
    /// Days after month end for monthly hard data.
    pub monthly_lag_days: i64,
    /// Day of the reference month on which surveys are published.
    pub survey_release_day: u32,
    /// Series ids treated as surveys.
    pub surveys: BTreeSet<String>,
}

impl Default for StylizedCalendar {
    fn default() -> Self {
        StylizedCalendar {
            gdp_lag_days: 45,
            monthly_lag_days: 30,
            survey_release_day: 20,
            surveys: BTreeSet::new(),
        }
    }
}

impl StylizedCalendar {
    pub fn gdp_release(&self, quarter: Period) -> NaiveDate {
        quarter.end_date() + Duration::days(self.gdp_lag_days)
    }

    pub fn monthly_release(&self, month: Period) -> NaiveDate {
        month.end_date() + Duration::days(self.monthly_lag_days)
    }

    pub fn survey_release(&self, month: Period) -> NaiveDate {
        let start = month.start_date();
        let day = self.survey_release_day.min(28);
        NaiveDate::from_ymd_opt(chrono::Datelike::year(&start), chrono::Datelike::month(&start), day)
            .expect("day 1..=28 exists")
    }

    /// Sentiment for a month is complete once the month ends.
    pub fn sentiment_release(&self, month: Period) -> NaiveDate {
        month.end_date()
    }

    pub fn is_survey(&self, series_id: &str) -> bool {
        self.surveys.contains(series_id)
    }

    /// Stylized release date of `period` for the given series.
    pub fn release_for(&self, series_id: &str, period: Period) -> NaiveDate {
        match period.frequency() {
            crate::calendar::Frequency::Quarterly => self.gdp_release(period),
            _ if self.is_survey(series_id) => self.survey_release(period),
            _ => self.monthly_release(period),
        }
    }
}

/// Calendar-only targets for the given quarters.
pub fn synth_release_calendar(country: &str, quarters: &[Period], calendar: &StylizedCalendar) -> Vec<TargetRelease> {
    quarters
        .iter()
        .map(|&q| TargetRelease {
            country: country.to_string(),
            quarter: q,
            release_date: calendar.gdp_release(q),
            value: None,
        })
        .collect()
}

/// One target per quarter: the first release date of its GDP level and the
/// annualized growth computed from the snapshot on that date. Quarters whose
/// previous quarter is unknown at that date are skipped.
pub fn target_releases(gdp: &VintageSeries) -> Result<Vec<TargetRelease>, VintageError> {
    let mut out = Vec::new();
    for q in gdp.periods() {
        let Some(first) = gdp.first_release(q) else { continue };
        let snap = gdp.as_of(first.release_date);
        let growth = transform(&snap, TransformKind::AnnualizedQoqGrowth)?;
        if let Some(v) = growth.get(q) {
            out.push(TargetRelease {
                country: gdp.country.clone(),
                quarter: q,
                release_date: first.release_date,
                value: Some(v.value),
            });
        }
    }
    Ok(out)
}

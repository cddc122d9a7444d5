//! Calendar periods at daily, monthly and quarterly frequency.
//!
//! A [`Period`] is an ordinal count of periods since year 0 at a fixed
//! [`Frequency`], which makes "consecutive" and "regular" checks plain integer
//! arithmetic.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Monthly,
    Quarterly,
}

impl Frequency {
    pub fn as_str(self) -> &'static str {
        match self {
            Frequency::Daily => "daily",
            Frequency::Monthly => "monthly",
            Frequency::Quarterly => "quarterly",
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Frequency {
    type Err = CalendarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "daily" | "d" => Ok(Frequency::Daily),
            "monthly" | "m" => Ok(Frequency::Monthly),
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            other => Err(CalendarError::UnknownFrequency(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalendarError {
    #[error("unknown frequency `{0}`")]
    UnknownFrequency(String),
    #[error("cannot parse `{text}` as a {freq} period")]
    BadPeriod { text: String, freq: Frequency },
}

/// A calendar period. Ordinals are days since 0001-01-01 (daily),
/// `year * 12 + month0` (monthly) or `year * 4 + quarter0` (quarterly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Period {
    freq: Frequency,
    ordinal: i64,
}

impl Period {
    pub fn day(date: NaiveDate) -> Self {
        Period {
            freq: Frequency::Daily,
            ordinal: i64::from(date.num_days_from_ce()),
        }
    }

    pub fn month(year: i32, month: u32) -> Self {
        debug_assert!((1..=12).contains(&month));
        Period {
            freq: Frequency::Monthly,
            ordinal: i64::from(year) * 12 + i64::from(month) - 1,
        }
    }

    pub fn quarter(year: i32, quarter: u32) -> Self {
        debug_assert!((1..=4).contains(&quarter));
        Period {
            freq: Frequency::Quarterly,
            ordinal: i64::from(year) * 4 + i64::from(quarter) - 1,
        }
    }

    /// The period of `freq` that contains `date`.
    pub fn containing(date: NaiveDate, freq: Frequency) -> Self {
        match freq {
            Frequency::Daily => Period::day(date),
            Frequency::Monthly => Period::month(date.year(), date.month()),
            Frequency::Quarterly => Period::quarter(date.year(), (date.month() - 1) / 3 + 1),
        }
    }

    pub fn frequency(self) -> Frequency {
        self.freq
    }

    pub fn ordinal(self) -> i64 {
        self.ordinal
    }

    pub fn offset(self, n: i64) -> Self {
        Period {
            freq: self.freq,
            ordinal: self.ordinal + n,
        }
    }

    pub fn next(self) -> Self {
        self.offset(1)
    }

    pub fn prev(self) -> Self {
        self.offset(-1)
    }

    /// Number of periods from `self` to `other` (same frequency).
    pub fn distance(self, other: Period) -> i64 {
        debug_assert_eq!(self.freq, other.freq);
        other.ordinal - self.ordinal
    }

    pub fn year(self) -> i32 {
        match self.freq {
            Frequency::Daily => self.start_date().year(),
            Frequency::Monthly => self.ordinal.div_euclid(12) as i32,
            Frequency::Quarterly => self.ordinal.div_euclid(4) as i32,
        }
    }

    pub fn start_date(self) -> NaiveDate {
        match self.freq {
            Frequency::Daily => NaiveDate::from_num_days_from_ce_opt(self.ordinal as i32)
                .expect("daily ordinal in range"),
            Frequency::Monthly => {
                let y = self.ordinal.div_euclid(12) as i32;
                let m = self.ordinal.rem_euclid(12) as u32 + 1;
                NaiveDate::from_ymd_opt(y, m, 1).expect("valid month")
            }
            Frequency::Quarterly => {
                let y = self.ordinal.div_euclid(4) as i32;
                let q = self.ordinal.rem_euclid(4) as u32;
                NaiveDate::from_ymd_opt(y, q * 3 + 1, 1).expect("valid quarter")
            }
        }
    }

    pub fn end_date(self) -> NaiveDate {
        match self.freq {
            Frequency::Daily => self.start_date(),
            _ => self.next().start_date() - Duration::days(1),
        }
    }

    pub fn contains(self, date: NaiveDate) -> bool {
        Period::containing(date, self.freq) == self
    }

    /// Converts to a coarser (or equal) frequency.
    pub fn to_frequency(self, freq: Frequency) -> Period {
        Period::containing(self.start_date(), freq)
    }

    pub fn parse(text: &str, freq: Frequency) -> Result<Self, CalendarError> {
        let bad = || CalendarError::BadPeriod {
            text: text.to_string(),
            freq,
        };
        let t = text.trim();
        match freq {
            Frequency::Daily => NaiveDate::parse_from_str(t, "%Y-%m-%d")
                .map(Period::day)
                .map_err(|_| bad()),
            Frequency::Monthly => {
                let (y, m) = t.split_once('-').ok_or_else(bad)?;
                let y: i32 = y.parse().map_err(|_| bad())?;
                let m: u32 = m.parse().map_err(|_| bad())?;
                if !(1..=12).contains(&m) {
                    return Err(bad());
                }
                Ok(Period::month(y, m))
            }
            Frequency::Quarterly => {
                let upper = t.to_ascii_uppercase();
                let (y, q) = upper.split_once('Q').ok_or_else(bad)?;
                let y: i32 = y.trim_end_matches('-').parse().map_err(|_| bad())?;
                let q: u32 = q.parse().map_err(|_| bad())?;
                if !(1..=4).contains(&q) {
                    return Err(bad());
                }
                Ok(Period::quarter(y, q))
            }
        }
    }

    /// Iterates `start..=end` inclusive.
    pub fn range_inclusive(start: Period, end: Period) -> impl Iterator<Item = Period> {
        debug_assert_eq!(start.freq, end.freq);
        (start.ordinal..=end.ordinal).map(move |o| Period {
            freq: start.freq,
            ordinal: o,
        })
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.freq {
            Frequency::Daily => write!(f, "{}", self.start_date().format("%Y-%m-%d")),
            Frequency::Monthly => write!(
                f,
                "{:04}-{:02}",
                self.ordinal.div_euclid(12),
                self.ordinal.rem_euclid(12) + 1
            ),
            Frequency::Quarterly => write!(
                f,
                "{:04}Q{}",
                self.ordinal.div_euclid(4),
                self.ordinal.rem_euclid(4) + 1
            ),
        }
    }
}

/// Parses `YYYY-MM-DD`.
pub fn parse_date(text: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d").ok()
}

//! Business-cycle regime calendar, CSV `start,end,label`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use super::IndicatorError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Expansion,
    Recession,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Expansion => "expansion",
            Regime::Recession => "recession",
        })
    }
}

impl FromStr for Regime {
    type Err = IndicatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "expansion" => Ok(Regime::Expansion),
            "recession" => Ok(Regime::Recession),
            other => Err(IndicatorError::Calendar(format!("unknown regime label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub label: Regime,
}

/// Contiguous, non-overlapping regime intervals in date order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegimeCalendar {
    spans: Vec<RegimeSpan>,
}

impl RegimeCalendar {
    pub fn new(mut spans: Vec<RegimeSpan>) -> Result<Self, IndicatorError> {
        spans.sort_by_key(|s| s.start);
        for s in &spans {
            if s.end < s.start {
                return Err(IndicatorError::Calendar(format!(
                    "interval {} .. {} ends before it starts",
                    s.start, s.end
                )));
            }
        }
        for w in spans.windows(2) {
            if w[1].start <= w[0].end {
                return Err(IndicatorError::Calendar(format!(
                    "intervals starting {} and {} overlap",
                    w[0].start, w[1].start
                )));
            }
            if w[1].start != w[0].end + Duration::days(1) {
                return Err(IndicatorError::Calendar(format!(
                    "gap between {} and {}",
                    w[0].end, w[1].start
                )));
            }
        }
        Ok(RegimeCalendar { spans })
    }

    pub fn spans(&self) -> &[RegimeSpan] {
        &self.spans
    }

    pub fn label(&self, date: NaiveDate) -> Option<Regime> {
        let i = self.spans.partition_point(|s| s.end < date);
        self.spans
            .get(i)
            .filter(|s| s.start <= date)
            .map(|s| s.label)
    }

    pub fn load(path: &Path) -> Result<Self, IndicatorError> {
        let read_err = |message: String| IndicatorError::Read {
            path: path.display().to_string(),
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| read_err(e.to_string()))?;
        let mut spans = Vec::new();
        for rec in rdr.deserialize::<RegimeSpan>() {
            spans.push(rec.map_err(|e| read_err(e.to_string()))?);
        }
        RegimeCalendar::new(spans)
    }

    pub fn write(&self, path: &Path, header: &str) -> std::io::Result<()> {
        let mut out = format!("{header}\nstart,end,label\n");
        for s in &self.spans {
            out.push_str(&format!("{},{},{}\n", s.start, s.end, s.label));
        }
        std::fs::write(path, out)
    }
}

//! Vintage CSV: `series_id,country,frequency,period,value,release_date`.
//!
//! An empty `release_date` takes the stylized calendar date and marks the
//! observation as pseudo-real-time.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Observation, StylizedCalendar, VintageError, VintageStore};
use crate::calendar::{parse_date, Frequency, Period};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VintageRow {
    pub series_id: String,
    pub country: String,
    pub frequency: String,
    pub period: String,
    pub value: f64,
    pub release_date: Option<String>,
}

pub fn read_vintages(path: &Path, calendar: &StylizedCalendar) -> Result<VintageStore, VintageError> {
    let file = std::fs::File::open(path).map_err(|e| VintageError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_vintages_from(file, &path.display().to_string(), calendar)
}

pub fn read_vintages_from<R: std::io::Read>(
    reader: R,
    label: &str,
    calendar: &StylizedCalendar,
) -> Result<VintageStore, VintageError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| VintageError::Read {
            path: label.to_string(),
            message: e.to_string(),
        })?
        .clone();
    let mut store = VintageStore::default();
    let mut rec = csv::StringRecord::new();
    loop {
        let row_err = |line: usize, message: String| VintageError::Row {
            path: label.to_string(),
            line,
            message,
        };
        let more = rdr.read_record(&mut rec).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            row_err(line, e.to_string())
        })?;
        if !more {
            break;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row: VintageRow = rec
            .deserialize(Some(&headers))
            .map_err(|e| row_err(line, e.to_string()))?;
        let freq: Frequency = row.frequency.parse().map_err(|e: crate::calendar::CalendarError| row_err(line, e.to_string()))?;
        if freq == Frequency::Daily {
            return Err(row_err(line, format!("series {}: daily vintages are not supported", row.series_id)));
        }
        let period = Period::parse(&row.period, freq).map_err(|e| row_err(line, e.to_string()))?;
        let (release_date, pseudo) = match row.release_date.as_deref().map(str::trim) {
            None | Some("") => (calendar.release_for(&row.series_id, period), true),
            Some(text) => (
                parse_date(text).ok_or_else(|| row_err(line, format!("bad release_date `{text}`")))?,
                false,
            ),
        };
        if !row.value.is_finite() {
            return Err(row_err(line, format!("non-finite value for {} {}", row.series_id, row.period)));
        }
        let series = store.entry(&row.country, &row.series_id, freq);
        if series.frequency != freq {
            return Err(VintageError::FrequencyMismatch {
                series: row.series_id.clone(),
                freq,
            });
        }
        series.early_release_allowed = calendar.is_survey(&row.series_id);
        series.insert(
            period,
            Observation {
                value: row.value,
                release_date,
                pseudo,
            },
        )?;
    }
    Ok(store)
}

/// Writes every release, one row each, after `header` (a `#` line).
pub fn write_vintages<W: Write>(writer: W, header: &str, store: &VintageStore) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(writer);
    writeln!(w, "{header}")?;
    let mut csv = csv::Writer::from_writer(w);
    for s in store.iter() {
        for (p, o) in s.releases() {
            csv.serialize(VintageRow {
                series_id: s.series_id.clone(),
                country: s.country.clone(),
                frequency: s.frequency.to_string(),
                period: p.to_string(),
                value: o.value,
                release_date: Some(o.release_date.to_string()),
            })?;
        }
    }
    csv.flush()
}

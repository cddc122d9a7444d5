//! Real-time data: vintages with release dates, as-of snapshots,
//! transformations, release calendars and the forecast horizon grid.

pub mod csv;
pub mod horizon;
pub mod store;
pub mod transform;

pub use horizon::{horizon_dates, synth_release_calendar, target_releases, HorizonGrid, StylizedCalendar, TargetRelease};
pub use store::{Observation, Snapshot, SnapshotValue, VintageSeries, VintageStore};
pub use transform::{transform, TransformKind};

use crate::calendar::Frequency;

#[derive(Debug, thiserror::Error)]
pub enum VintageError {
    #[error("series {series}: {period} released on {release} before the period ends")]
    EarlyRelease {
        series: String,
        period: String,
        release: String,
    },
    #[error("series {series}: duplicate release {release} for {period}")]
    DuplicateRelease {
        series: String,
        period: String,
        release: String,
    },
    #[error("series {series}: {freq} frequency does not match the series")]
    FrequencyMismatch { series: String, freq: Frequency },
    #[error("{kind} needs a positive level, found {value} at {period}")]
    NonPositive {
        kind: &'static str,
        period: String,
        value: f64,
    },
    #[error("{path} line {line}: {message}")]
    Row {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
}

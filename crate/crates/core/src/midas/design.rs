//! Real-time U-MIDAS regressor panels.
//!
//! A panel holds one row per target quarter at a fixed horizon `h`. Row `t`
//! is built from the vintage snapshots of `d_t − h`, where `d_t` is the
//! release date of the target. Monthly series enter as their most recent
//! `lags` values at that date, GDP growth as its most recent quarterly values.
//! Because a row depends only on its own information date, the same panel
//! serves every forecast origin; an origin only chooses which rows are
//! estimation rows.

use chrono::{Duration, NaiveDate};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::MidasError;
use crate::calendar::Period;
use crate::diag::Diagnostic;
use crate::vintage::{transform, Snapshot, SnapshotValue, TargetRelease, TransformKind, VintageStore};

/// Minimum number of complete estimation rows.
pub const MIN_ROWS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub id: String,
    pub transform: TransformKind,
    /// Number of most recent values entering as columns.
    pub lags: usize,
}

impl SeriesSpec {
    pub fn new(id: &str, transform: TransformKind, lags: usize) -> Self {
        SeriesSpec {
            id: id.to_string(),
            transform,
            lags,
        }
    }

    fn labels(&self) -> impl Iterator<Item = String> + '_ {
        (1..=self.lags).map(move |k| format!("{}_l{k}", self.id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    /// Quarterly GDP level series; its annualized growth supplies the y-lags.
    pub gdp_id: String,
    pub y_lags: usize,
    pub controls: Vec<SeriesSpec>,
    /// Candidate focal regressors, each entering as its latest value.
    pub focals: Vec<SeriesSpec>,
    pub min_rows: usize,
}

impl DesignSpec {
    pub fn control_labels(&self) -> Vec<String> {
        let y = (1..=self.y_lags).map(|k| format!("{}_l{k}", self.gdp_id));
        y.chain(self.controls.iter().flat_map(SeriesSpec::labels)).collect()
    }

    pub fn focal_labels(&self) -> Vec<String> {
        self.focals.iter().map(|f| f.id.clone()).collect()
    }
}

/// A published level that a design value was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub period: Period,
    pub release_date: NaiveDate,
    pub value: f64,
}

/// A design value with the releases it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub series: String,
    pub transform: TransformKind,
    pub period: Period,
    pub value: f64,
    pub sources: Vec<Source>,
}

impl Cell {
    /// Latest release date among the sources.
    pub fn release_date(&self) -> NaiveDate {
        self.sources.iter().map(|s| s.release_date).max().expect("cells have sources")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmidasRow {
    pub target: TargetRelease,
    /// `d_t − h`.
    pub info_date: NaiveDate,
    pub controls: Vec<Cell>,
    pub focals: Vec<Cell>,
}

impl UmidasRow {
    pub fn y(&self) -> Option<f64> {
        self.target.value
    }

    pub fn control_values(&self) -> Vec<f64> {
        self.controls.iter().map(|c| c.value).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UmidasDesign {
    pub country: String,
    pub horizon: u32,
    pub control_labels: Vec<String>,
    pub focal_labels: Vec<String>,
    /// Complete rows in target order.
    pub rows: Vec<UmidasRow>,
    pub min_rows: usize,
    pub diagnostics: Vec<Diagnostic>,
}

/// The `lags` most recent transformed values visible at `date`, newest first.
fn latest_cells(store: &VintageStore, country: &str, spec: &SeriesSpec, date: NaiveDate) -> Result<Option<Vec<Cell>>, MidasError> {
    let series = store
        .get(country, &spec.id)
        .ok_or_else(|| MidasError::MissingSeries(format!("{country}/{}", spec.id)))?;
    let raw = series.as_of(date);
    let derived = transform(&raw, spec.transform)?;
    let latest = derived.latest(spec.lags);
    if latest.len() < spec.lags {
        return Ok(None);
    }
    let cells = latest
        .into_iter()
        .map(|(period, v)| Cell {
            series: spec.id.clone(),
            transform: spec.transform,
            period,
            value: v.value,
            sources: sources_of(&raw, period, spec.transform),
        })
        .collect();
    Ok(Some(cells))
}

fn sources_of(raw: &Snapshot, period: Period, kind: TransformKind) -> Vec<Source> {
    let periods = if kind == TransformKind::Level {
        vec![period]
    } else {
        vec![period.prev(), period]
    };
    periods
        .into_iter()
        .filter_map(|p| {
            raw.get(p).map(|v| Source {
                period: p,
                release_date: v.release_date,
                value: v.value,
            })
        })
        .collect()
}

/// Builds the panel for one country and horizon over the given targets.
/// Targets without a realized value still get a row (they can be predicted);
/// rows with a missing cell are dropped with a diagnostic.
pub fn build_design(
    store: &VintageStore,
    country: &str,
    targets: &[TargetRelease],
    horizon: u32,
    spec: &DesignSpec,
) -> Result<UmidasDesign, MidasError> {
    let gdp = SeriesSpec::new(&spec.gdp_id, TransformKind::AnnualizedQoqGrowth, spec.y_lags);
    let mut rows = Vec::with_capacity(targets.len());
    let mut diagnostics = Vec::new();
    'targets: for target in targets {
        let info_date = target.release_date - Duration::days(i64::from(horizon));
        let mut controls = Vec::new();
        for s in std::iter::once(&gdp).chain(&spec.controls) {
            match latest_cells(store, country, s, info_date)? {
                Some(cells) => controls.extend(cells),
                None => {
                    diagnostics.push(Diagnostic::new(
                        format!("{country} {} h={horizon}", target.quarter),
                        format!("fewer than {} values of {} known on {info_date}", s.lags, s.id),
                    ));
                    continue 'targets;
                }
            }
        }
        let mut focals = Vec::new();
        for f in &spec.focals {
            let one = SeriesSpec::new(&f.id, f.transform, 1);
            match latest_cells(store, country, &one, info_date)? {
                Some(mut cells) => focals.push(cells.remove(0)),
                None => {
                    diagnostics.push(Diagnostic::new(
                        format!("{country} {} h={horizon}", target.quarter),
                        format!("no value of {} known on {info_date}", f.id),
                    ));
                    continue 'targets;
                }
            }
        }
        rows.push(UmidasRow {
            target: target.clone(),
            info_date,
            controls,
            focals,
        });
    }
    Ok(UmidasDesign {
        country: country.to_string(),
        horizon,
        control_labels: spec.control_labels(),
        focal_labels: spec.focal_labels(),
        rows,
        min_rows: spec.min_rows,
        diagnostics,
    })
}

/// Estimation sample at one origin, standardized with its own moments.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationData {
    /// Indices into the design rows.
    pub rows: Vec<usize>,
    /// Indices into the control labels of the columns kept.
    pub kept: Vec<usize>,
    pub labels: Vec<String>,
    /// Standardized controls, one column per kept label.
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    /// Raw focal columns, one vector per focal.
    pub focals: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

impl EstimationData {
    /// Applies the estimation-row moments to a full control row.
    pub fn standardize_row(&self, controls: &[f64]) -> Vec<f64> {
        self.kept
            .iter()
            .enumerate()
            .map(|(k, &j)| (controls[j] - self.means[k]) / self.sds[k])
            .collect()
    }
}

impl UmidasDesign {
    /// Rows whose target value was published by `origin`.
    pub fn estimation_rows(&self, origin: NaiveDate) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| {
                let t = &self.rows[i].target;
                t.release_date <= origin && t.value.is_some()
            })
            .collect()
    }

    pub fn row_for(&self, quarter: Period) -> Option<usize> {
        self.rows.iter().position(|r| r.target.quarter == quarter)
    }

    /// Standardizes the controls on `rows` and drops constant columns and
    /// columns that duplicate an earlier one after standardization.
    pub fn estimation_data(&self, rows: &[usize]) -> Result<EstimationData, MidasError> {
        if rows.len() < self.min_rows {
            return Err(MidasError::TooFewRows {
                rows: rows.len(),
                needed: self.min_rows,
            });
        }
        let n = rows.len();
        let p = self.control_labels.len();
        let raw = DMatrix::from_fn(n, p, |i, j| self.rows[rows[i]].controls[j].value);
        let mut kept = Vec::new();
        let mut columns: Vec<Vec<f64>> = Vec::new();
        let (mut means, mut sds) = (Vec::new(), Vec::new());
        let mut diagnostics = Vec::new();
        let location = format!("{} h={}", self.country, self.horizon);
        for j in 0..p {
            let col: Vec<f64> = raw.column(j).iter().copied().collect();
            let mean = crate::stats::mean(&col);
            let sd = crate::stats::population_variance(&col).sqrt();
            let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(sd > 1e-12 * scale.max(1.0)) {
                diagnostics.push(Diagnostic::new(&location, format!("dropped constant column {}", self.control_labels[j])));
                continue;
            }
            let z: Vec<f64> = col.iter().map(|v| (v - mean) / sd).collect();
            if let Some(k) = columns.iter().position(|c| c.iter().zip(&z).all(|(a, b)| (a - b).abs() < 1e-12)) {
                diagnostics.push(Diagnostic::new(
                    &location,
                    format!(
                        "dropped column {} duplicating {}",
                        self.control_labels[j], self.control_labels[kept[k]]
                    ),
                ));
                continue;
            }
            kept.push(j);
            columns.push(z);
            means.push(mean);
            sds.push(sd);
        }
        let x = DMatrix::from_fn(n, kept.len(), |i, k| columns[k][i]);
        let y = rows
            .iter()
            .map(|&i| self.rows[i].y().expect("estimation rows have values"))
            .collect();
        let focals = (0..self.focal_labels.len())
            .map(|f| rows.iter().map(|&i| self.rows[i].focals[f].value).collect())
            .collect();
        Ok(EstimationData {
            rows: rows.to_vec(),
            labels: kept.iter().map(|&j| self.control_labels[j].clone()).collect(),
            kept,
            x,
            y,
            focals,
            means,
            sds,
            diagnostics,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub cells_checked: usize,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.cells_checked += other.cells_checked;
        self.violations.extend(other.violations);
    }
}

/// Checks every cell of `row` against the store: each source must be
/// released by the information date, be a release the store actually holds,
/// and be the value the store shows on that date; the cell value must equal
/// the transform of its sources.
pub fn audit_row(store: &VintageStore, country: &str, row: &UmidasRow) -> AuditReport {
    let mut report = AuditReport::default();
    for cell in row.controls.iter().chain(&row.focals) {
        report.cells_checked += 1;
        let here = format!("{country} {} {} {}", row.target.quarter, cell.series, cell.period);
        let Some(series) = store.get(country, &cell.series) else {
            report.violations.push(format!("{here}: series not in store"));
            continue;
        };
        let visible = series.as_of(row.info_date);
        for src in &cell.sources {
            if src.release_date > row.info_date {
                report.violations.push(format!(
                    "{here}: source {} released {} after {}",
                    src.period, src.release_date, row.info_date
                ));
            }
            if !series.has_release(src.period, src.release_date, src.value) {
                report.violations.push(format!("{here}: no release of {} on {}", src.period, src.release_date));
            }
            let shown = visible.get(src.period);
            if shown.map(|v| (v.release_date, v.value.to_bits())) != Some((src.release_date, src.value.to_bits())) {
                report.violations.push(format!("{here}: {} is not the vintage visible on {}", src.period, row.info_date));
            }
        }
        let mut snap = Snapshot::default();
        for src in &cell.sources {
            snap.values.insert(
                src.period,
                SnapshotValue {
                    value: src.value,
                    release_date: src.release_date,
                },
            );
        }
        let recomputed = transform(&snap, cell.transform).ok().and_then(|s| s.get(cell.period));
        if recomputed.map(|v| v.value.to_bits()) != Some(cell.value.to_bits()) {
            report.violations.push(format!("{here}: value does not follow from its sources"));
        }
    }
    for group in cell_groups(&row.controls).chain(row.focals.iter().map(std::slice::from_ref)) {
        check_recency(store, country, row, group, &mut report);
    }
    report
}

/// Runs of consecutive cells from the same series.
fn cell_groups(cells: &[Cell]) -> impl Iterator<Item = &[Cell]> {
    cells.chunk_by(|a, b| a.series == b.series)
}

/// The cells of one series must be exactly its most recent periods visible
/// on the information date, so a release that became visible earlier than
/// recorded changes the expected periods.
fn check_recency(store: &VintageStore, country: &str, row: &UmidasRow, group: &[Cell], report: &mut AuditReport) {
    let first = &group[0];
    let Some(series) = store.get(country, &first.series) else { return };
    let Ok(derived) = transform(&series.as_of(row.info_date), first.transform) else {
        report.violations.push(format!("{country} {} {}: transform failed", row.target.quarter, first.series));
        return;
    };
    let expected: Vec<Period> = derived.latest(group.len()).into_iter().map(|(p, _)| p).collect();
    let found: Vec<Period> = group.iter().map(|c| c.period).collect();
    if expected != found {
        report.violations.push(format!(
            "{country} {} {}: periods {found:?} but {expected:?} visible on {}",
            row.target.quarter, first.series, row.info_date
        ));
    }
}

pub fn audit_design(store: &VintageStore, design: &UmidasDesign) -> AuditReport {
    let mut report = AuditReport::default();
    for row in &design.rows {
        report.merge(audit_row(store, &design.country, row));
    }
    report
}

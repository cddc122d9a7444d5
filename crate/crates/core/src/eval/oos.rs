//! Expanding-window out-of-sample experiment.
//!
//! For every country, horizon and target quarter in the evaluation span the
//! forecast origin is `d_T − h`. Estimation rows are the targets published
//! by the origin, from the estimation start on. Selection is redone at every
//! origin:
//!
//! - ARX: lasso of `y` on the controls gives `A`; OLS of `y` on `[1, X_A]`.
//! - ARXS for indicator `s`: lasso of `s` on the controls gives `B`; OLS of
//!   `y` on `[1, s, X_{A∪B}]`.
//! - AVERAGE: mean of the ARXS forecasts of a cell.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::average::average_forecasts;
use super::records::{arxs_name, sort_records, ForecastRecord, ARX};
use super::EvalError;
use crate::calendar::Period;
use crate::diag::Diagnostic;
use crate::midas::{audit_design, build_design, ols, select_controls, AuditReport, DesignSpec, EstimationData, MidasError, UmidasDesign};
use crate::vintage::{HorizonGrid, TargetRelease, VintageStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosSpec {
    pub countries: Vec<String>,
    pub design: DesignSpec,
    pub grid: HorizonGrid,
    pub estimation_start: Period,
    pub oos_start: Period,
    pub oos_end: Period,
    pub penalty_c: f64,
}

impl OosSpec {
    pub fn validate(&self) -> Result<(), EvalError> {
        let quarterly = |p: Period| p.frequency() == crate::calendar::Frequency::Quarterly;
        if !(quarterly(self.estimation_start) && quarterly(self.oos_start) && quarterly(self.oos_end)) {
            return Err(EvalError::Invalid("sample bounds must be quarters".into()));
        }
        if self.oos_start <= self.estimation_start {
            return Err(EvalError::Invalid(format!(
                "evaluation start {} is not after estimation start {}",
                self.oos_start, self.estimation_start
            )));
        }
        if self.oos_end < self.oos_start {
            return Err(EvalError::Invalid(format!("evaluation end {} precedes its start {}", self.oos_end, self.oos_start)));
        }
        if self.grid.is_empty() {
            return Err(EvalError::Invalid("empty horizon grid".into()));
        }
        if !(self.penalty_c > 0.0) {
            return Err(EvalError::Invalid(format!("penalty constant {} must be positive", self.penalty_c)));
        }
        Ok(())
    }

    pub fn oos_quarters(&self) -> Vec<Period> {
        Period::range_inclusive(self.oos_start, self.oos_end).collect()
    }

    pub fn model_names(&self) -> Vec<String> {
        std::iter::once(ARX.to_string())
            .chain(self.design.focals.iter().map(|f| arxs_name(&f.id)))
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct OosOutput {
    /// Sorted by country, model, horizon, target.
    pub records: Vec<ForecastRecord>,
    pub diagnostics: Vec<Diagnostic>,
    pub audit: AuditReport,
    /// Cells for which no forecast of some model could be produced.
    pub failed_cells: usize,
}

/// The panels of every country and horizon, built over the targets from the
/// estimation start to the end of the evaluation span.
pub fn build_panels(
    store: &VintageStore,
    targets: &BTreeMap<String, Vec<TargetRelease>>,
    spec: &OosSpec,
) -> Result<Vec<UmidasDesign>, EvalError> {
    let cells: Vec<(&String, u32)> = spec
        .countries
        .iter()
        .flat_map(|c| spec.grid.horizons.iter().map(move |&h| (c, h)))
        .collect();
    cells
        .into_par_iter()
        .map(|(country, h)| {
            let t = targets
                .get(country)
                .ok_or_else(|| EvalError::Invalid(format!("no GDP targets for {country}")))?;
            let within: Vec<TargetRelease> = t
                .iter()
                .filter(|r| r.quarter >= spec.estimation_start && r.quarter <= spec.oos_end)
                .cloned()
                .collect();
            Ok(build_design(store, country, &within, h, &spec.design)?)
        })
        .collect()
}

/// Columns `[1, focal?, X_selected]` of the estimation sample.
fn regressors(data: &EstimationData, focal: Option<&[f64]>, selected: &[usize]) -> DMatrix<f64> {
    let n = data.y.len();
    let offset = 1 + usize::from(focal.is_some());
    let mut m = DMatrix::from_element(n, offset + selected.len(), 1.0);
    if let Some(s) = focal {
        m.set_column(1, &nalgebra::DVector::from_column_slice(s));
    }
    for (k, &j) in selected.iter().enumerate() {
        m.set_column(offset + k, &data.x.column(j));
    }
    m
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Forecasts of every model for one panel row, or the error that stopped
/// each model.
fn forecast_cell(design: &UmidasDesign, row_idx: usize, spec: &OosSpec, estimation_start: Period) -> Result<Vec<(String, Result<f64, MidasError>)>, MidasError> {
    let row = &design.rows[row_idx];
    let origin = row.info_date;
    let est: Vec<usize> = design
        .estimation_rows(origin)
        .into_iter()
        .filter(|&i| design.rows[i].target.quarter >= estimation_start)
        .collect();
    let data = design.estimation_data(&est)?;
    let n = data.y.len();
    let xrow = data.standardize_row(&row.control_values());
    let a = select_controls(&data.x, &data.y, spec.penalty_c)?;

    let mut out = Vec::new();
    let arx = (|| {
        if a.len() + 1 >= n {
            return Err(MidasError::Saturated { selected: a.len(), n });
        }
        let fit = ols(&regressors(&data, None, &a), &data.y)?;
        let pred: Vec<f64> = std::iter::once(1.0).chain(a.iter().map(|&j| xrow[j])).collect();
        Ok(fit.predict(&pred))
    })();
    out.push((ARX.to_string(), arx));

    for (k, focal) in spec.design.focals.iter().enumerate() {
        let s = &data.focals[k];
        let result = (|| {
            let b = select_controls(&data.x, s, spec.penalty_c)?;
            let u = union(&a, &b);
            if u.len() + 2 >= n {
                return Err(MidasError::Saturated { selected: u.len(), n });
            }
            let fit = ols(&regressors(&data, Some(s), &u), &data.y)?;
            let pred: Vec<f64> = [1.0, row.focals[k].value]
                .into_iter()
                .chain(u.iter().map(|&j| xrow[j]))
                .collect();
            Ok(fit.predict(&pred))
        })();
        out.push((arxs_name(&focal.id), result));
    }
    Ok(out)
}

/// Estimation rows must be published by the origin and the forecast date
/// must be the row's information date.
fn audit_cell(design: &UmidasDesign, row_idx: usize) -> AuditReport {
    let row = &design.rows[row_idx];
    let mut report = AuditReport {
        cells_checked: 1,
        violations: Vec::new(),
    };
    for i in design.estimation_rows(row.info_date) {
        let t = &design.rows[i].target;
        if t.release_date > row.info_date || t.quarter >= row.target.quarter {
            report.violations.push(format!(
                "{} {} h={}: estimation target {} released {} after origin {}",
                design.country, row.target.quarter, design.horizon, t.quarter, t.release_date, row.info_date
            ));
        }
    }
    report
}

fn run_panel(store: &VintageStore, design: &UmidasDesign, spec: &OosSpec) -> OosOutput {
    let mut out = OosOutput {
        audit: audit_design(store, design),
        diagnostics: design.diagnostics.clone(),
        ..OosOutput::default()
    };
    for quarter in spec.oos_quarters() {
        let here = format!("{} {} h={}", design.country, quarter, design.horizon);
        let Some(idx) = design.row_for(quarter) else {
            out.diagnostics.push(Diagnostic::new(&here, "no complete design row"));
            out.failed_cells += 1;
            continue;
        };
        out.audit.merge(audit_cell(design, idx));
        let row = &design.rows[idx];
        match forecast_cell(design, idx, spec, spec.estimation_start) {
            Err(e) => {
                out.diagnostics.push(Diagnostic::new(&here, e.to_string()));
                out.failed_cells += 1;
            }
            Ok(models) => {
                let mut failed = false;
                for (model, result) in models {
                    match result {
                        Ok(prediction) if prediction.is_finite() => out.records.push(ForecastRecord {
                            model,
                            country: design.country.clone(),
                            target: quarter,
                            horizon: design.horizon,
                            forecast_date: row.info_date,
                            prediction,
                            realized: row.target.value,
                        }),
                        Ok(_) => {
                            out.diagnostics.push(Diagnostic::new(&here, format!("{model}: non-finite prediction")));
                            failed = true;
                        }
                        Err(e) => {
                            out.diagnostics.push(Diagnostic::new(&here, format!("{model}: {e}")));
                            failed = true;
                        }
                    }
                }
                out.failed_cells += usize::from(failed);
            }
        }
    }
    out
}

/// Runs the experiment over prebuilt panels; the result does not depend on
/// the thread count.
pub fn run_oos_on(store: &VintageStore, panels: &[UmidasDesign], spec: &OosSpec) -> OosOutput {
    let parts: Vec<OosOutput> = panels.par_iter().map(|d| run_panel(store, d, spec)).collect();
    let mut out = OosOutput::default();
    for p in parts {
        out.records.extend(p.records);
        out.diagnostics.extend(p.diagnostics);
        out.audit.merge(p.audit);
        out.failed_cells += p.failed_cells;
    }
    let members: Vec<String> = spec.design.focals.iter().map(|f| arxs_name(&f.id)).collect();
    if !members.is_empty() {
        let (avg, diag) = average_forecasts(&out.records, &members);
        out.records.extend(avg);
        out.diagnostics.extend(diag);
    }
    sort_records(&mut out.records);
    out
}

pub fn run_oos(store: &VintageStore, targets: &BTreeMap<String, Vec<TargetRelease>>, spec: &OosSpec) -> Result<OosOutput, EvalError> {
    spec.validate()?;
    let panels = build_panels(store, targets, spec)?;
    Ok(run_oos_on(store, &panels, spec))
}

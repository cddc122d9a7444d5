//! Full-sample significance of each indicator across horizons, with
//! adaptive FDR adjustment over the horizon grid.

use serde::{Deserialize, Serialize};

use super::oos::OosSpec;
use crate::diag::Diagnostic;
use crate::midas::{adjust_pvalues, double_lasso, DoubleLassoOptions, UmidasDesign};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InSampleRow {
    pub country: String,
    pub indicator: String,
    pub horizon: u32,
    pub eta_hat: f64,
    pub std_err: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub rejected: bool,
}

/// Double-lasso estimates on every row with a published target, then the
/// two-stage step-up adjustment per (country, indicator) at level `q`.
/// Rows are ordered by country, indicator, horizon.
pub fn in_sample(panels: &[UmidasDesign], spec: &OosSpec, q: f64) -> (Vec<InSampleRow>, Vec<Diagnostic>) {
    let opts = DoubleLassoOptions { penalty_c: spec.penalty_c };
    let mut diagnostics = Vec::new();
    let mut out = Vec::new();
    for country in &spec.countries {
        for (k, focal) in spec.design.focals.iter().enumerate() {
            let mut fits = Vec::new();
            for design in panels.iter().filter(|d| &d.country == country) {
                let here = format!("{country} {} h={}", focal.id, design.horizon);
                let rows: Vec<usize> = (0..design.rows.len())
                    .filter(|&i| {
                        let t = &design.rows[i].target;
                        t.value.is_some() && t.quarter >= spec.estimation_start && t.quarter <= spec.oos_end
                    })
                    .collect();
                let fit = design
                    .estimation_data(&rows)
                    .and_then(|data| double_lasso(&data.y, &data.focals[k], &data.x, &opts));
                match fit {
                    Ok(r) => fits.push((design.horizon, r)),
                    Err(e) => diagnostics.push(Diagnostic::new(here, e.to_string())),
                }
            }
            if fits.is_empty() {
                continue;
            }
            let raw: Vec<f64> = fits.iter().map(|(_, r)| r.p_value).collect();
            let report = adjust_pvalues(&raw, q).expect("p-values lie in [0, 1] and q in (0, 1)");
            for (i, (h, r)) in fits.into_iter().enumerate() {
                out.push(InSampleRow {
                    country: country.clone(),
                    indicator: focal.id.clone(),
                    horizon: h,
                    eta_hat: r.eta_hat,
                    std_err: r.std_err,
                    p_raw: r.p_value,
                    p_adjusted: report.adjusted[i],
                    rejected: report.rejected[i],
                });
            }
        }
    }
    (out, diagnostics)
}

//! Equal-weight forecast pooling.

use std::collections::BTreeMap;

use super::{ForecastRecord, AVERAGE};
use crate::calendar::Period;
use crate::diag::Diagnostic;

/// One `AVERAGE` record per (country, target, horizon) where every member
/// model has a forecast; incomplete cells are skipped with a diagnostic.
pub fn average_forecasts(records: &[ForecastRecord], members: &[String]) -> (Vec<ForecastRecord>, Vec<Diagnostic>) {
    let mut cells: BTreeMap<(&str, u32, Period), BTreeMap<&str, &ForecastRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| members.contains(&r.model)) {
        cells.entry((&r.country, r.horizon, r.target)).or_default().insert(&r.model, r);
    }
    let mut out = Vec::new();
    let mut diagnostics = Vec::new();
    for ((country, horizon, target), found) in cells {
        if found.len() < members.len() {
            let missing: Vec<&str> = members.iter().map(String::as_str).filter(|m| !found.contains_key(m)).collect();
            diagnostics.push(Diagnostic::new(
                format!("{country} {target} h={horizon}"),
                format!("no AVERAGE: missing {}", missing.join(", ")),
            ));
            continue;
        }
        // Deviations from the first member, summed in member order: identical
        // members give exactly their common value, and record order is irrelevant.
        let first = found[members[0].as_str()];
        let dev: f64 = members.iter().map(|m| found[m.as_str()].prediction - first.prediction).sum();
        out.push(ForecastRecord {
            model: AVERAGE.to_string(),
            country: country.to_string(),
            target,
            horizon,
            forecast_date: first.forecast_date,
            prediction: first.prediction + dev / members.len() as f64,
            realized: first.realized,
        });
    }
    (out, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn rec(model: &str, prediction: f64) -> ForecastRecord {
        ForecastRecord {
            model: model.into(),
            country: "FR".into(),
            target: Period::quarter(2010, 1),
            horizon: 30,
            forecast_date: NaiveDate::from_ymd_opt(2010, 4, 15).unwrap(),
            prediction,
            realized: Some(1.0),
        }
    }

    fn members() -> Vec<String> {
        (1..=6).map(|i| format!("ARXS:t{i}")).collect()
    }

    #[test]
    fn mean_of_members() {
        let recs: Vec<_> = members().iter().zip(1..).map(|(m, v)| rec(m, v as f64)).collect();
        let (avg, diag) = average_forecasts(&recs, &members());
        assert!(diag.is_empty());
        assert_eq!(avg.len(), 1);
        assert_eq!(avg[0].prediction, 3.5);
        assert_eq!(avg[0].model, AVERAGE);
    }

    #[test]
    fn identical_members_reproduced_exactly() {
        let v = 0.1 + 0.2;
        let recs: Vec<_> = members().iter().map(|m| rec(m, v)).collect();
        assert_eq!(average_forecasts(&recs, &members()).0[0].prediction, v);
    }

    #[test]
    fn missing_member_skips_cell() {
        let recs: Vec<_> = members().iter().skip(1).map(|m| rec(m, 1.0)).collect();
        let (avg, diag) = average_forecasts(&recs, &members());
        assert!(avg.is_empty());
        assert_eq!(diag.len(), 1);
    }
}

use std::collections::HashMap;

use super::IndicatorSeries;
use crate::calendar::Frequency;
use crate::diag::Diagnostic;
use crate::stats::pearson;

/// Pairwise-complete observations required for a correlation cell.
pub const MIN_OVERLAP: usize = 8;

/// Symmetric correlation matrix keyed by (country, name).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub keys: Vec<(String, String)>,
    pub values: Vec<Vec<Option<f64>>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: (&str, &str), b: (&str, &str)) -> Option<f64> {
        let pos = |k: (&str, &str)| self.keys.iter().position(|x| x.0 == k.0 && x.1 == k.1);
        self.values[pos(a)?][pos(b)?]
    }
}

/// Pearson correlations of the series at quarterly frequency (finer series
/// are averaged within the quarter first).
pub fn cross_correlations(series: &[IndicatorSeries]) -> CorrelationMatrix {
    let quarterly: Vec<IndicatorSeries> = series
        .iter()
        .map(|s| {
            if s.frequency() == Frequency::Quarterly {
                s.clone()
            } else {
                s.aggregate_to(Frequency::Quarterly)
            }
        })
        .collect();
    let maps: Vec<HashMap<_, f64>> = quarterly.iter().map(|s| s.observed().into_iter().collect()).collect();
    let n = series.len();
    let mut values = vec![vec![None; n]; n];
    let mut diagnostics = Vec::new();
    for i in 0..n {
        values[i][i] = Some(1.0);
        for j in i + 1..n {
            let mut periods: Vec<_> = maps[i].keys().filter(|p| maps[j].contains_key(p)).copied().collect();
            periods.sort();
            let label = format!(
                "{}/{} ~ {}/{}",
                series[i].country, series[i].name, series[j].country, series[j].name
            );
            if periods.len() < MIN_OVERLAP {
                diagnostics.push(Diagnostic::new(
                    label,
                    format!("only {} overlapping quarters (need {MIN_OVERLAP})", periods.len()),
                ));
                continue;
            }
            let x: Vec<f64> = periods.iter().map(|p| maps[i][p]).collect();
            let y: Vec<f64> = periods.iter().map(|p| maps[j][p]).collect();
            match pearson(&x, &y) {
                Some(r) => {
                    values[i][j] = Some(r);
                    values[j][i] = Some(r);
                }
                None => diagnostics.push(Diagnostic::new(label, "constant series")),
            }
        }
    }
    CorrelationMatrix {
        keys: series.iter().map(|s| (s.country.clone(), s.name.clone())).collect(),
        values,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::Period;
    use proptest::prelude::*;

    fn q(name: &str, values: &[f64]) -> IndicatorSeries {
        IndicatorSeries::new("FR", name, Period::quarter(2000, 1), values.iter().map(|v| Some(*v)).collect())
    }

    #[test]
    fn self_and_negated() {
        let x = [0.1, 0.5, -0.3, 0.9, 0.2, -0.7, 0.4, 0.0, 0.3];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let m = cross_correlations(&[q("a", &x), q("b", &neg), q("c", &x)]);
        assert_eq!(m.values[0][0], Some(1.0));
        assert!((m.values[0][1].unwrap() + 1.0).abs() < 1e-12);
        assert!((m.values[0][2].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_ten_point_pair() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0, 5.0, 8.0, 6.0, 10.0, 9.0];
        // direct formula: r = (n Σxy − Σx Σy) / sqrt((n Σx² − (Σx)²)(n Σy² − (Σy)²))
        let n = 10.0;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        let oracle = (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
        assert!((oracle - 0.903030303030303).abs() < 1e-12);
        let m = cross_correlations(&[q("a", &x), q("b", &y)]);
        assert!((m.get(("FR", "a"), ("FR", "b")).unwrap() - 0.903030303030303).abs() < 1e-12);
    }

    #[test]
    fn short_overlap_is_missing() {
        let m = cross_correlations(&[q("a", &[1.0, 2.0, 3.0]), q("b", &[3.0, 1.0, 2.0])]);
        assert_eq!(m.values[0][1], None);
        assert_eq!(m.diagnostics.len(), 1);
    }

    proptest! {
        #[test]
        fn symmetric_unit_diagonal_bounded(
            data in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.8, -3.0f64..3.0), 12), 1..5)
        ) {
            let series: Vec<_> = data.iter().enumerate().map(|(i, v)| {
                IndicatorSeries::new("DE", &format!("s{i}"), Period::quarter(2001, 1), v.clone())
            }).collect();
            let m = cross_correlations(&series);
            for i in 0..series.len() {
                prop_assert_eq!(m.values[i][i], Some(1.0));
                for j in 0..series.len() {
                    prop_assert_eq!(m.values[i][j], m.values[j][i]);
                    if let Some(r) = m.values[i][j] {
                        prop_assert!((-1.0..=1.0).contains(&r));
                    }
                }
            }
        }
    }
}

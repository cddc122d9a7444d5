use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Snapshot, SnapshotValue, VintageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Level,
    PctGrowth,
    FirstDiff,
    AnnualizedQoqGrowth,
}

impl TransformKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Level => "level",
            TransformKind::PctGrowth => "pct_growth",
            TransformKind::FirstDiff => "first_diff",
            TransformKind::AnnualizedQoqGrowth => "annualized_qoq_growth",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "level" | "none" => Ok(TransformKind::Level),
            "pct_growth" => Ok(TransformKind::PctGrowth),
            "first_diff" => Ok(TransformKind::FirstDiff),
            "annualized_qoq_growth" => Ok(TransformKind::AnnualizedQoqGrowth),
            other => Err(format!("unknown transform `{other}`")),
        }
    }
}

/// Applies `kind` to consecutive periods of a snapshot. A period whose
/// predecessor is absent is dropped; the result carries the later of the two
/// release dates involved.
pub fn transform(snapshot: &Snapshot, kind: TransformKind) -> Result<Snapshot, VintageError> {
    if kind == TransformKind::Level {
        return Ok(snapshot.clone());
    }
    let mut values = BTreeMap::new();
    for (&p, cur) in &snapshot.values {
        let Some(prev) = snapshot.values.get(&p.prev()) else {
            continue;
        };
        let (x0, x1) = (prev.value, cur.value);
        let ratio_kind = |name: &'static str| -> Result<(), VintageError> {
            for (period, v) in [(p.prev(), x0), (p, x1)] {
                if !(v > 0.0) {
                    return Err(VintageError::NonPositive {
                        kind: name,
                        period: period.to_string(),
                        value: v,
                    });
                }
            }
            Ok(())
        };
        let value = match kind {
            TransformKind::Level => unreachable!(),
            TransformKind::FirstDiff => x1 - x0,
            TransformKind::PctGrowth => {
                ratio_kind("pct_growth")?;
                100.0 * (x1 / x0 - 1.0)
            }
            TransformKind::AnnualizedQoqGrowth => {
                ratio_kind("annualized_qoq_growth")?;
                400.0 * (x1 / x0).ln()
            }
        };
        values.insert(
            p,
            SnapshotValue {
                value,
                release_date: cur.release_date.max(prev.release_date),
            },
        );
    }
    Ok(Snapshot { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::Period;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn snap(values: &[f64]) -> Snapshot {
        let r = NaiveDate::from_ymd_opt(2020, 6, 1).unwrap();
        Snapshot {
            values: values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    (
                        Period::month(2019, 1).offset(i as i64),
                        SnapshotValue {
                            value: *v,
                            release_date: r,
                        },
                    )
                })
                .collect(),
        }
    }

    fn vals(s: &Snapshot) -> Vec<f64> {
        s.values.values().map(|v| v.value).collect()
    }

    #[test]
    fn examples() {
        let g = transform(&snap(&[100.0, 101.0]), TransformKind::PctGrowth).unwrap();
        assert!((vals(&g)[0] - 1.0).abs() < 1e-12);
        assert_eq!(vals(&transform(&snap(&[3.0; 5]), TransformKind::FirstDiff).unwrap()), vec![0.0; 4]);
        assert_eq!(
            vals(&transform(&snap(&[100.0, 100.0]), TransformKind::AnnualizedQoqGrowth).unwrap()),
            vec![0.0]
        );
        assert_eq!(
            transform(&snap(&[100.0, 101.0]), TransformKind::FirstDiff).unwrap().values.keys().next(),
            Some(&Period::month(2019, 2))
        );
    }

    #[test]
    fn nonpositive_level_names_period() {
        let err = transform(&snap(&[1.0, 0.0, 2.0]), TransformKind::PctGrowth).unwrap_err();
        assert!(err.to_string().contains("2019-02"));
    }

    #[test]
    fn gap_drops_period_and_release_is_later() {
        let mut s = snap(&[1.0, 2.0, 3.0, 4.0]);
        s.values.remove(&Period::month(2019, 2));
        let late = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        s.values.get_mut(&Period::month(2019, 3)).unwrap().release_date = late;
        let t = transform(&s, TransformKind::FirstDiff).unwrap();
        assert_eq!(t.values.keys().copied().collect::<Vec<_>>(), vec![Period::month(2019, 4)]);
        assert_eq!(t.values[&Period::month(2019, 4)].release_date, late);
    }

    proptest! {
        #[test]
        fn first_diff_cumsum_recovers_levels(levels in prop::collection::vec(-1e3f64..1e3, 2..40)) {
            let levels: Vec<f64> = levels.iter().map(|v| (v * 64.0).round() / 64.0).collect();
            let d = vals(&transform(&snap(&levels), TransformKind::FirstDiff).unwrap());
            let mut acc = 0.0;
            for (i, step) in d.iter().enumerate() {
                acc += step;
                prop_assert_eq!(acc, levels[i + 1] - levels[0]);
            }
        }
    }
}
